#include "binrec/recovery.hpp"

#include <cmath>
#include <string>

namespace binrec {

namespace {

LpProblem box_lp(const RecoveryProblem& p, double sign) {
  LpProblem lp;
  const Index n = p.cols();
  lp.c = Vector::Constant(n, sign);
  lp.A_eq = p.A;
  lp.b_eq = p.b;
  lp.A_ineq = Matrix(0, n);
  lp.b_ineq = Vector(0);
  lp.lower = Vector::Zero(n);
  lp.upper = Vector::Ones(n);
  return lp;
}

RecoveryReport from_lp(const LpSolution& sol, Program program) {
  RecoveryReport r;
  r.program = program;
  r.iterations = sol.iterations;
  if (sol.status != LpStatus::optimal) {
    r.status = SolveStatus::infeasible;
    return r;
  }
  r.status = SolveStatus::optimal;
  r.x_hat = sol.x.cwiseMax(0.0).cwiseMin(1.0);
  return r;
}

double distance_to_rounding(const Vector& x) {
  return (round_to_binary(x).cast<double>() - x).norm();
}

Vector project_to_ball(const Vector& v, double radius) {
  const double norm = v.norm();
  if (norm <= radius) return v;
  return v * (radius / norm);
}

}  // namespace

std::string_view to_string(Program program) {
  switch (program) {
    case Program::box_bp: return "box_bp";
    case Program::box_bp_mirror: return "box_bp_mirror";
    case Program::mibi_bp: return "mibi_bp";
    case Program::robust_box_bp: return "robust_box_bp";
    case Program::box_ls: return "box_ls";
  }
  return "unknown";
}

Program parse_program(std::string_view name) {
  if (name == "box_bp" || name == "box-bp") return Program::box_bp;
  if (name == "box_bp_mirror" || name == "mirror-bp" || name == "mirror_bp") return Program::box_bp_mirror;
  if (name == "mibi_bp" || name == "mibi-bp") return Program::mibi_bp;
  if (name == "robust_box_bp" || name == "robust-bp" || name == "robust_bp") return Program::robust_box_bp;
  if (name == "box_ls" || name == "box-ls") return Program::box_ls;
  throw ConfigError("unknown program: " + std::string(name));
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::not_converged: return "not_converged";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

void RecoveryProblem::validate() const {
  if (b.size() != A.rows()) throw ConfigError("recovery: b must have one entry per row of A");
  if (eta && !(*eta >= 0.0)) throw ConfigError("recovery: eta must be nonnegative");
}

RecoveryReport box_bp(const RecoveryProblem& p, const RecoveryOptions& opt) {
  p.validate();
  auto r = from_lp(solve_lp(box_lp(p, 1.0), opt.lp), Program::box_bp);
  if (r.status == SolveStatus::optimal) r.objective = r.x_hat.sum();
  return r;
}

RecoveryReport box_bp_mirror(const RecoveryProblem& p, const RecoveryOptions& opt) {
  p.validate();
  auto r = from_lp(solve_lp(box_lp(p, -1.0), opt.lp), Program::box_bp_mirror);
  if (r.status == SolveStatus::optimal) r.objective = static_cast<double>(p.cols()) - r.x_hat.sum();
  return r;
}

RecoveryReport mibi_bp(const RecoveryProblem& p, const RecoveryOptions& opt) {
  const RecoveryReport plain = box_bp(p, opt);
  const RecoveryReport mirror = box_bp_mirror(p, opt);
  RecoveryReport out;
  const bool plain_ok = plain.status == SolveStatus::optimal;
  const bool mirror_ok = mirror.status == SolveStatus::optimal;
  if (!plain_ok && !mirror_ok) {
    out = plain;
  } else if (plain_ok && (!mirror_ok || distance_to_rounding(plain.x_hat) <= distance_to_rounding(mirror.x_hat))) {
    out = plain;
    out.branch_chosen = Branch::plain;
  } else {
    out = mirror;
    out.branch_chosen = Branch::mirror;
  }
  out.program = Program::mibi_bp;
  out.iterations = plain.iterations + mirror.iterations;
  return out;
}

RecoveryReport robust_box_bp(const RecoveryProblem& p, const RecoveryOptions& opt) {
  p.validate();
  if (!p.eta) throw ConfigError("robust_box_bp: eta is required");
  const double eta = *p.eta;
  const Index n = p.cols();

  if (eta == 0.0) {
    RecoveryReport r = box_bp(p, opt);
    r.program = Program::robust_box_bp;
    return r;
  }

  RecoveryReport r;
  r.program = Program::robust_box_bp;
  if (p.b.norm() <= eta) {
    r.x_hat = Vector::Zero(n);
    return r;
  }

  const Vector lower = Vector::Zero(n);
  const Vector upper = Vector::Ones(n);

  // The box-LS minimum decides feasibility and gives a feasible start.
  BoxLsResult ls = solve_box_ls(p.A, p.b, lower, upper, opt.box_ls);
  if (ls.residual_norm > eta * (1.0 + 1e-9) + 1e-12) {
    r.status = SolveStatus::infeasible;
    r.iterations = ls.iterations;
    return r;
  }

  Vector x = ls.x;
  Vector z = project_to_ball(p.A * x - p.b, eta);
  Vector u = Vector::Zero(p.rows());
  double beta = 1.0;
  const double b_scale = 1.0 + p.b.norm();
  BoxLsOptions inner = opt.box_ls;
  inner.tol = std::min(inner.tol, 1e-11);

  bool converged = false;
  Index iter = 0;
  while (iter < opt.admm_max_iter) {
    ++iter;
    const Vector target = p.b + z - u;
    const Vector linear = Vector::Constant(n, 1.0 / beta);
    x = solve_box_qp(p.A, target, linear, lower, upper, &x, inner).x;
    const Vector ax_b = p.A * x - p.b;
    const Vector z_old = z;
    z = project_to_ball(ax_b + u, eta);
    u += ax_b - z;

    const double primal = (ax_b - z).norm();
    const double dual = beta * (p.A.transpose() * (z - z_old)).norm();
    const double dual_scale = 1.0 + beta * (p.A.transpose() * u).norm();
    if (primal <= opt.admm_tol * b_scale && dual <= opt.admm_tol * dual_scale) {
      converged = true;
      break;
    }
    // Residual balancing.
    if (primal > 10.0 * dual) {
      beta *= 2.0;
      u /= 2.0;
    } else if (dual > 10.0 * primal) {
      beta /= 2.0;
      u *= 2.0;
    }
  }

  // ADMM meets the constraint only in the limit. Pull x toward the box-LS
  // point (inside the ball) until ||Ax - b|| = eta; the segment stays in the box.
  const Vector r0 = p.A * x - p.b;
  if (r0.norm() > eta) {
    const Vector dr = (p.A * ls.x - p.b) - r0;
    const double qa = dr.squaredNorm(), qb = 2.0 * r0.dot(dr), qc = r0.squaredNorm() - eta * eta;
    double theta = 1.0;
    if (qa > 0.0) theta = std::clamp((-qb - std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc))) / (2.0 * qa), 0.0, 1.0);
    x += theta * (ls.x - x);
  }

  r.x_hat = x;
  r.objective = x.sum();
  r.iterations = iter;
  r.status = converged ? SolveStatus::optimal : SolveStatus::not_converged;
  return r;
}

RecoveryReport box_ls(const RecoveryProblem& p, const RecoveryOptions& opt) {
  p.validate();
  const Index n = p.cols();
  const BoxLsResult ls = solve_box_ls(p.A, p.b, Vector::Zero(n), Vector::Ones(n), opt.box_ls);
  RecoveryReport r;
  r.program = Program::box_ls;
  r.x_hat = ls.x;
  r.objective = ls.residual_norm;
  r.iterations = ls.iterations;
  r.status = ls.converged ? SolveStatus::optimal : SolveStatus::not_converged;
  return r;
}

RecoveryReport run_program(Program program, const RecoveryProblem& p, const RecoveryOptions& opt) {
  switch (program) {
    case Program::box_bp: return box_bp(p, opt);
    case Program::box_bp_mirror: return box_bp_mirror(p, opt);
    case Program::mibi_bp: return mibi_bp(p, opt);
    case Program::robust_box_bp: return robust_box_bp(p, opt);
    case Program::box_ls: return box_ls(p, opt);
  }
  throw ConfigError("run_program: unknown program");
}

Eigen::VectorXi round_to_binary(const Vector& x) {
  Eigen::VectorXi out(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = static_cast<int>(std::floor(x[i] + 0.5));
  return out;
}

bool recovery_success(const Vector& x_hat, const BinarySignal& x0, double tol) {
  if (x_hat.size() != x0.size()) return false;
  const Vector truth = x0.dense();
  return (x_hat - truth).norm() <= tol * std::max(1.0, truth.norm());
}

bool box_bp_recovers_uniquely(const Matrix& A, const BinarySignal& x0, const RecoveryOptions& opt) {
  const Vector truth = x0.dense();
  const RecoveryProblem p{A, A * truth, std::nullopt};
  const RecoveryReport r = box_bp(p, opt);
  if (r.status != SolveStatus::optimal || !recovery_success(r.x_hat, x0)) return false;

  // Any other optimal point gives a face point with <s, x - x0> <= -1.
  LpProblem face = box_lp(p, 1.0);
  face.c = 2.0 * truth - Vector::Ones(truth.size());
  face.A_ineq = Matrix::Ones(1, truth.size());
  face.b_ineq = Vector::Constant(1, r.objective + 1e-9 * (1.0 + r.objective));
  const LpSolution sol = solve_lp(face, opt.lp);
  if (sol.status != LpStatus::optimal) return false;
  return sol.objective >= face.c.dot(truth) - 0.5;
}

}  // namespace binrec
