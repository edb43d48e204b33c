#include "binrec/analysis.hpp"

#include "binrec/rng.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace binrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConeSign intersect_sign(ConeSign a, ConeSign b) {
  if (a == b) return a;
  if (a == ConeSign::free) return b;
  if (b == ConeSign::free) return a;
  return ConeSign::zero;
}

}  // namespace

ConeSpec ConeSpec::house(const BinarySignal& K) {
  ConeSpec cone;
  cone.signs.assign(static_cast<std::size_t>(K.size()), ConeSign::nonneg);
  for (Index i : K.support()) cone.signs[static_cast<std::size_t>(i)] = ConeSign::nonpos;
  return cone;
}

ConeSpec ConeSpec::bnsp(const BinarySignal& K) {
  ConeSpec cone = house(K);
  cone.sum_nonpos = true;
  return cone;
}

ConeSpec ConeSpec::intersect(const ConeSpec& other) const {
  if (other.size() != size()) throw ConfigError("cone intersection: length mismatch");
  ConeSpec out;
  out.sum_nonpos = sum_nonpos || other.sum_nonpos;
  out.signs.resize(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) out.signs[i] = intersect_sign(signs[i], other.signs[i]);
  return out;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::holds ? "holds" : "fails";
}

CertificateResult check_kernel_cone(const Matrix& A, const ConeSpec& cone, const LpTolerances& tol) {
  const Index n = A.cols();
  if (cone.size() != n) throw ConfigError("check_kernel_cone: cone length must equal A.cols()");

  // A nonzero kernel element either has a nonzero signed coordinate, which
  // we normalize to sum |w_i| = 1 over signed coordinates, or lives on the
  // free coordinates alone.
  std::vector<Index> free_cols;
  LpProblem lp = LpProblem::with_bounds(n, 0.0, 1.0);
  lp.A_eq = Matrix::Zero(A.rows() + 1, n);
  lp.A_eq.topRows(A.rows()) = A;
  lp.b_eq = Vector::Zero(A.rows() + 1);
  lp.b_eq[A.rows()] = 1.0;
  for (Index i = 0; i < n; ++i) {
    switch (cone.signs[static_cast<std::size_t>(i)]) {
      case ConeSign::nonneg: lp.A_eq(A.rows(), i) = 1.0; break;
      case ConeSign::nonpos:
        lp.A_eq(A.rows(), i) = -1.0;
        lp.lower[i] = -1.0;
        lp.upper[i] = 0.0;
        break;
      case ConeSign::zero: lp.upper[i] = 0.0; break;
      case ConeSign::free:
        lp.lower[i] = -kInf;
        lp.upper[i] = kInf;
        free_cols.push_back(i);
        break;
    }
  }
  if (cone.sum_nonpos) {
    lp.A_ineq = Matrix::Ones(1, n);
    lp.b_ineq = Vector::Zero(1);
  }

  CertificateResult result;
  auto fail_with = [&](Vector w) {
    result.verdict = Verdict::fails;
    const double l1 = w.lpNorm<1>();
    if (l1 > 0.0) w /= l1;
    result.witness = std::move(w);
    return result;
  };

  const FeasibilityResult feas = lp_feasible(lp, tol);
  if (feas.feasible) return fail_with(*feas.witness);

  if (!free_cols.empty()) {
    Matrix AF(A.rows(), static_cast<Index>(free_cols.size()));
    for (std::size_t c = 0; c < free_cols.size(); ++c) AF.col(static_cast<Index>(c)) = A.col(free_cols[c]);
    Eigen::FullPivLU<Matrix> lu(AF);
    const double max_abs = AF.size() > 0 ? AF.cwiseAbs().maxCoeff() : 0.0;
    lu.setThreshold(1e-10 * (1.0 + max_abs));
    if (lu.rank() < AF.cols()) {
      Vector v = lu.kernel().col(0);
      // v or -v satisfies the sum constraint.
      if (cone.sum_nonpos && v.sum() > 0.0) v = -v;
      Vector w = Vector::Zero(n);
      for (std::size_t c = 0; c < free_cols.size(); ++c) w[free_cols[c]] = v[static_cast<Index>(c)];
      return fail_with(std::move(w));
    }
  }
  result.verdict = Verdict::holds;
  result.margin = feas.infeasibility;
  return result;
}

CertificateResult check_hkplus_dual(const Matrix& A, const BinarySignal& K, const LpTolerances& tol) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (K.size() != n) throw ConfigError("check_hkplus_dual: signal length must equal A.cols()");

  LpProblem lp = LpProblem::with_bounds(m, -kInf, kInf);
  lp.A_ineq = Matrix(n, m);
  lp.b_ineq = Vector::Constant(n, -1.0);
  for (Index i = 0; i < n; ++i) {
    if (K.contains(i)) lp.A_ineq.row(i) = A.col(i).transpose();
    else lp.A_ineq.row(i) = -A.col(i).transpose();
  }

  const FeasibilityResult feas = lp_feasible(lp, tol);
  CertificateResult result;
  if (!feas.feasible) {
    result.verdict = Verdict::fails;
    return result;
  }
  result.verdict = Verdict::holds;
  result.witness = *feas.witness;
  result.margin = (A.transpose() * *feas.witness).cwiseAbs().minCoeff();
  return result;
}

double default_rho(double mu, double sigma) {
  if (mu == 0.0) throw DomainError("certificate: rho is undefined for mu = 0; pass an explicit rho");
  return -sigma * sigma / (4.0 * mu);
}

double certificate_threshold(Index m, double sigma) { return static_cast<double>(m) * sigma * sigma / 36.0; }
double certificate_threshold_loose(Index m, double sigma) { return static_cast<double>(m) * sigma * sigma / 32.0; }
double certificate_threshold_coarse(Index m, double sigma) { return static_cast<double>(m) * sigma * sigma / 6.0; }

Vector build_dual_certificate(const Matrix& D, double mu, double sigma, const BinarySignal& J,
                              std::optional<double> rho_override) {
  if (J.size() != D.cols()) throw ConfigError("build_dual_certificate: support length must equal D.cols()");
  if (J.sparsity() == 0) throw ConfigError("build_dual_certificate: J must be nonempty");
  const double rho = rho_override ? *rho_override : default_rho(mu, sigma);
  const Index m = D.rows();
  Vector de = Vector::Zero(m);
  for (Index i : J.support()) de += D.col(i);
  const double centering = de.sum() / static_cast<double>(m);
  return Vector::Constant(m, rho - centering) + de;
}

CertificateCheck verify_certificate(const Matrix& A, const Vector& nu, const BinarySignal& K, double t) {
  if (nu.size() != A.rows() || K.size() != A.cols())
    throw ConfigError("verify_certificate: dimension mismatch");
  if (!(t >= 0.0)) throw ConfigError("verify_certificate: t must be nonnegative");
  const Vector atnu = A.transpose() * nu;
  CertificateCheck check;
  check.margins.resize(atnu.size());
  for (Index i = 0; i < atnu.size(); ++i) check.margins[i] = (K.contains(i) ? -atnu[i] : atnu[i]) - t;
  check.min_margin = check.margins.size() > 0 ? check.margins.minCoeff() : kInf;
  check.holds = check.min_margin > 0.0;
  return check;
}

CertificateCheck verify_support_certificate(const Matrix& A, const Vector& nu, const BinarySignal& K, double t) {
  return verify_certificate(A, -nu, K, t);
}

SingularValueBounds restricted_sv_bounds(const Matrix& A, const BinarySignal& K, Index num_samples,
                                         std::uint64_t seed, const std::optional<Vector>& certificate) {
  const Index n = A.cols();
  if (K.size() != n) throw ConfigError("restricted_sv_bounds: signal length must equal A.cols()");

  // Any v with A'v in H_K^s gives <v, Ax> >= s ||x||_1 >= s ||x||_2 on H_K.
  SingularValueBounds out;
  auto ratio = [&](const Vector& v) {
    const Vector atv = A.transpose() * v;
    double s = kInf;
    for (Index i = 0; i < n; ++i) s = std::min(s, K.contains(i) ? -atv[i] : atv[i]);
    const double norm = v.norm();
    return (s > 0.0 && norm > 0.0) ? s / norm : 0.0;
  };
  // The LP sees A scaled to unit max entry so the bounds are homogeneous in A.
  const double scale = A.size() > 0 ? A.cwiseAbs().maxCoeff() : 0.0;
  if (scale > 0.0) {
    const CertificateResult dual = check_hkplus_dual(A / scale, K);
    if (dual.witness) out.lower = ratio(*dual.witness);
  }
  if (certificate) out.lower = std::max(out.lower, ratio(*certificate));

  double upper = kInf;
  auto consider = [&](const Vector& x) {
    const double norm = x.norm();
    if (norm > 0.0) upper = std::min(upper, (A * x).norm() / norm);
  };
  for (Index i = 0; i < n; ++i) consider(Vector::Unit(n, i) * (K.contains(i) ? -1.0 : 1.0));
  rng::Stream stream(rng::derive(seed, 0x5356));
  Vector x(n);
  for (Index s = 0; s < num_samples; ++s) {
    for (Index i = 0; i < n; ++i) {
      const double g = std::abs(stream.normal());
      x[i] = K.contains(i) ? -g : g;
    }
    consider(x);
  }
  if (out.lower == 0.0) {
    const CertificateResult kernel = check_kernel_cone(A, ConeSpec::house(K));
    if (kernel.witness) consider(*kernel.witness);
  }
  out.upper = n > 0 ? upper : 0.0;
  out.lower = std::min(out.lower, out.upper);
  return out;
}

}  // namespace binrec
