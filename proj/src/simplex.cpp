#include "binrec/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace binrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Index kReinvertEvery = 50;

enum class VarState : std::uint8_t { basic, at_lower, at_upper, free_zero };

enum class Outcome { optimal, unbounded };

// Columns of the working matrix: [structural | slacks of <= rows | artificials].
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& problem, const LpTolerances& tol) : prob_(problem), tol_(tol) {
    n_ = problem.num_vars();
    p_ = problem.A_eq.rows();
    q_ = problem.A_ineq.rows();
    rows_ = p_ + q_;
    cols_ = n_ + q_ + rows_;
    max_iter_ = 50 * (rows_ + cols_) + 1000;
    build();
  }

  // Returns false if the constraints are infeasible.
  bool phase_one() {
    Vector cost = Vector::Zero(cols_);
    cost.tail(rows_).setOnes();
    optimize(cost);
    reinvert();
    infeasibility_ = 0.0;
    for (Index i = 0; i < rows_; ++i) infeasibility_ += std::max(0.0, x_[n_ + q_ + i]);
    double scale = 1.0;
    if (rows_ > 0) scale += rhs_.cwiseAbs().maxCoeff();
    // Harris steps may leave each artificial up to feas above zero.
    if (infeasibility_ > tol_.feas * scale * static_cast<double>(1 + rows_)) return false;
    drive_out_artificials();
    for (Index i = 0; i < rows_; ++i) {
      const Index a = n_ + q_ + i;
      lo_[a] = 0.0;
      hi_[a] = 0.0;
      if (state_[a] != VarState::basic) {
        state_[a] = VarState::at_lower;
        x_[a] = 0.0;
      }
    }
    reinvert();
    return true;
  }

  Outcome phase_two() {
    Vector cost = Vector::Zero(cols_);
    cost.head(n_) = prob_.c;
    const Outcome out = optimize(cost);
    reinvert();
    return out;
  }

  Vector structural() const { return x_.head(n_); }
  double infeasibility() const { return infeasibility_; }
  Index iterations() const { return iterations_; }

  // y solving B' y = c_B for the phase-2 costs.
  Vector row_duals() const {
    if (rows_ == 0) return Vector(0);
    Vector cb(rows_);
    for (Index i = 0; i < rows_; ++i) {
      const Index j = head_[static_cast<std::size_t>(i)];
      cb[i] = j < n_ ? prob_.c[j] : 0.0;
    }
    return lu_.transpose().solve(cb);
  }

 private:
  void build() {
    M_ = Matrix::Zero(rows_, cols_);
    rhs_.resize(rows_);
    if (p_ > 0) {
      M_.block(0, 0, p_, n_) = prob_.A_eq;
      rhs_.head(p_) = prob_.b_eq;
    }
    if (q_ > 0) {
      M_.block(p_, 0, q_, n_) = prob_.A_ineq;
      M_.block(p_, n_, q_, q_).setIdentity();
      rhs_.tail(q_) = prob_.b_ineq;
    }

    lo_.resize(cols_);
    hi_.resize(cols_);
    x_ = Vector::Zero(cols_);
    state_.assign(static_cast<std::size_t>(cols_), VarState::at_lower);
    lo_.head(n_) = prob_.lower;
    hi_.head(n_) = prob_.upper;
    lo_.segment(n_, q_).setZero();
    hi_.segment(n_, q_).setConstant(kInf);
    lo_.tail(rows_).setZero();
    hi_.tail(rows_).setConstant(kInf);

    for (Index j = 0; j < n_; ++j) {
      auto& s = state_[static_cast<std::size_t>(j)];
      if (std::isfinite(lo_[j])) {
        s = VarState::at_lower;
        x_[j] = lo_[j];
      } else if (std::isfinite(hi_[j])) {
        s = VarState::at_upper;
        x_[j] = hi_[j];
      } else {
        s = VarState::free_zero;
        x_[j] = 0.0;
      }
    }

    head_.assign(static_cast<std::size_t>(rows_), 0);
    const Vector residual = rows_ > 0 ? Vector(rhs_ - M_.leftCols(n_) * x_.head(n_)) : Vector(0);
    for (Index i = 0; i < rows_; ++i) {
      const Index art = n_ + q_ + i;
      if (i >= p_ && residual[i] >= 0.0) {
        const Index slack = n_ + (i - p_);
        head_[static_cast<std::size_t>(i)] = slack;
        state_[static_cast<std::size_t>(slack)] = VarState::basic;
        x_[slack] = residual[i];
        hi_[art] = 0.0;
        continue;
      }
      M_(i, art) = residual[i] >= 0.0 ? 1.0 : -1.0;
      head_[static_cast<std::size_t>(i)] = art;
      state_[static_cast<std::size_t>(art)] = VarState::basic;
      x_[art] = std::abs(residual[i]);
    }
    reinvert();
  }

  // Recomputes B^{-1}M and the basic values from the original data.
  void reinvert() {
    since_reinvert_ = 0;
    if (rows_ == 0) {
      T_.resize(0, cols_);
      return;
    }
    Matrix basis(rows_, rows_);
    for (Index i = 0; i < rows_; ++i) basis.col(i) = M_.col(head_[static_cast<std::size_t>(i)]);
    lu_.compute(basis);
    if (!(lu_.rcond() > 1e-14)) throw SolverError("simplex: basis matrix is numerically singular");
    T_ = lu_.solve(M_);
    Vector r = rhs_;
    for (Index j = 0; j < cols_; ++j) {
      if (state_[static_cast<std::size_t>(j)] != VarState::basic && x_[j] != 0.0) r -= M_.col(j) * x_[j];
    }
    const Vector xb = lu_.solve(r);
    for (Index i = 0; i < rows_; ++i) x_[head_[static_cast<std::size_t>(i)]] = xb[i];
  }

  void pivot(Index row, Index col) {
    const double piv = T_(row, col);
    Eigen::RowVectorXd pivot_row = T_.row(row) / piv;
    Vector factors = T_.col(col);
    factors[row] = 0.0;
    T_.noalias() -= factors * pivot_row;
    T_.row(row) = pivot_row;
  }

  Outcome optimize(const Vector& cost) {
    const double opt_tol = tol_.opt * (1.0 + cost.cwiseAbs().maxCoeff());
    const Index bland_threshold = 5 * cols_;
    Index degenerate_run = 0;
    bool bland = false;
    Vector cb(rows_);

    for (;;) {
      if (++iterations_ > max_iter_) throw SolverError("simplex: iteration limit exceeded");
      for (Index i = 0; i < rows_; ++i) cb[i] = cost[head_[static_cast<std::size_t>(i)]];
      const Eigen::RowVectorXd d = cost.transpose() - cb.transpose() * T_;

      Index enter = -1;
      int dir = 0;
      double best = 0.0;
      for (Index j = 0; j < cols_; ++j) {
        const VarState s = state_[static_cast<std::size_t>(j)];
        if (s == VarState::basic || lo_[j] == hi_[j]) continue;
        int cand = 0;
        if (s == VarState::at_lower && d[j] < -opt_tol) cand = 1;
        else if (s == VarState::at_upper && d[j] > opt_tol) cand = -1;
        else if (s == VarState::free_zero && std::abs(d[j]) > opt_tol) cand = d[j] < 0.0 ? 1 : -1;
        if (cand == 0) continue;
        if (bland) {
          enter = j;
          dir = cand;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          enter = j;
          dir = cand;
        }
      }
      if (enter < 0) return Outcome::optimal;

      const double flip = hi_[enter] - lo_[enter];  // inf unless both bounds finite

      // Harris pass 1: largest step with bounds relaxed by the feasibility tolerance.
      double theta_max = flip;
      for (Index i = 0; i < rows_; ++i) {
        const double alpha = T_(i, enter);
        if (std::abs(alpha) <= tol_.pivot) continue;
        const Index b = head_[static_cast<std::size_t>(i)];
        const double rate = -dir * alpha;
        double limit = kInf;
        // Basic values may already sit slightly outside their bounds.
        if (rate < 0.0 && std::isfinite(lo_[b])) limit = std::max(0.0, (x_[b] - lo_[b] + tol_.feas) / -rate);
        else if (rate > 0.0 && std::isfinite(hi_[b])) limit = std::max(0.0, (hi_[b] + tol_.feas - x_[b]) / rate);
        theta_max = std::min(theta_max, limit);
      }
      if (!std::isfinite(theta_max)) return Outcome::unbounded;

      // Pass 2: among rows whose exact ratio fits, take the largest pivot
      // (or, under Bland, the smallest ratio with the lowest variable index).
      Index leave_row = -1;
      double theta = kInf;
      double best_alpha = 0.0;
      Index best_var = cols_;
      Index min_row = -1;
      double min_limit = kInf;
      for (Index i = 0; i < rows_; ++i) {
        const double alpha = T_(i, enter);
        if (std::abs(alpha) <= tol_.pivot) continue;
        const Index b = head_[static_cast<std::size_t>(i)];
        const double rate = -dir * alpha;
        double limit = kInf;
        if (rate < 0.0 && std::isfinite(lo_[b])) limit = std::max(0.0, (x_[b] - lo_[b]) / -rate);
        else if (rate > 0.0 && std::isfinite(hi_[b])) limit = std::max(0.0, (hi_[b] - x_[b]) / rate);
        if (!std::isfinite(limit)) continue;
        if (limit < min_limit) {
          min_limit = limit;
          min_row = i;
        }
        if (bland) {
          if (limit < theta - 1e-12 || (limit <= theta + 1e-12 && b < best_var)) {
            theta = limit;
            best_var = b;
            leave_row = i;
          }
        } else if (limit <= theta_max && std::abs(alpha) > best_alpha) {
          best_alpha = std::abs(alpha);
          theta = limit;
          leave_row = i;
        }
      }

      if (leave_row < 0 && min_limit < flip) {
        leave_row = min_row;
        theta = min_limit;
      }
      const bool bound_flip = leave_row < 0 || flip <= theta;
      if (bound_flip) theta = flip;

      if (theta > tol_.feas) {
        degenerate_run = 0;
        bland = false;
      } else if (++degenerate_run > bland_threshold) {
        bland = true;
      }

      x_[enter] += dir * theta;
      if (theta != 0.0) {
        for (Index i = 0; i < rows_; ++i) x_[head_[static_cast<std::size_t>(i)]] -= dir * theta * T_(i, enter);
      }

      if (bound_flip) {
        state_[static_cast<std::size_t>(enter)] = dir > 0 ? VarState::at_upper : VarState::at_lower;
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }

      const Index leaving = head_[static_cast<std::size_t>(leave_row)];
      const double rate = -dir * T_(leave_row, enter);
      if (rate < 0.0) {
        state_[static_cast<std::size_t>(leaving)] = VarState::at_lower;
        x_[leaving] = lo_[leaving];
      } else {
        state_[static_cast<std::size_t>(leaving)] = VarState::at_upper;
        x_[leaving] = hi_[leaving];
      }
      head_[static_cast<std::size_t>(leave_row)] = enter;
      state_[static_cast<std::size_t>(enter)] = VarState::basic;
      pivot(leave_row, enter);
      if (++since_reinvert_ >= kReinvertEvery) reinvert();
    }
  }

  // Replaces basic artificials by structural or slack columns. Rows where no
  // such column has a usable pivot are redundant; their artificial stays
  // basic, fixed at zero.
  void drive_out_artificials() {
    const Index first_art = n_ + q_;
    for (Index i = 0; i < rows_; ++i) {
      if (head_[static_cast<std::size_t>(i)] < first_art) continue;
      Index best = -1;
      double best_abs = tol_.pivot;
      for (Index j = 0; j < first_art; ++j) {
        if (state_[static_cast<std::size_t>(j)] == VarState::basic) continue;
        if (std::abs(T_(i, j)) > best_abs) {
          best_abs = std::abs(T_(i, j));
          best = j;
        }
      }
      if (best < 0) continue;
      const Index art = head_[static_cast<std::size_t>(i)];
      state_[static_cast<std::size_t>(art)] = VarState::at_lower;
      x_[art] = 0.0;
      head_[static_cast<std::size_t>(i)] = best;
      state_[static_cast<std::size_t>(best)] = VarState::basic;
      pivot(i, best);
    }
  }

  const LpProblem& prob_;
  LpTolerances tol_;
  Index n_ = 0, p_ = 0, q_ = 0, rows_ = 0, cols_ = 0;
  Index max_iter_ = 0;
  Index iterations_ = 0;
  Index since_reinvert_ = 0;
  double infeasibility_ = 0.0;
  Matrix M_;
  Vector rhs_;
  Vector lo_, hi_, x_;
  std::vector<Index> head_;
  std::vector<VarState> state_;
  Matrix T_;
  Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace

LpProblem LpProblem::with_bounds(Index n, double lower, double upper) {
  LpProblem p;
  p.c = Vector::Zero(n);
  p.A_eq = Matrix(0, n);
  p.b_eq = Vector(0);
  p.A_ineq = Matrix(0, n);
  p.b_ineq = Vector(0);
  p.lower = Vector::Constant(n, lower);
  p.upper = Vector::Constant(n, upper);
  return p;
}

void LpProblem::validate() const {
  const Index n = c.size();
  if (A_eq.cols() != n || A_ineq.cols() != n) throw ConfigError("lp: constraint matrices need n columns");
  if (A_eq.rows() != b_eq.size() || A_ineq.rows() != b_ineq.size())
    throw ConfigError("lp: right-hand side length mismatch");
  if (lower.size() != n || upper.size() != n) throw ConfigError("lp: bound length mismatch");
  for (Index j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw ConfigError("lp: lower bound exceeds upper bound");
    if (lower[j] == kInf || upper[j] == -kInf) throw ConfigError("lp: empty variable domain");
  }
  if (!c.allFinite() || !A_eq.allFinite() || !b_eq.allFinite() || !A_ineq.allFinite() || !b_ineq.allFinite())
    throw ConfigError("lp: non-finite data");
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

LpSolution solve_lp(const LpProblem& problem, const LpTolerances& tol) {
  problem.validate();
  BoundedSimplex simplex(problem, tol);
  LpSolution sol;
  const bool feasible = simplex.phase_one();
  sol.phase1_infeasibility = simplex.infeasibility();
  if (!feasible) {
    sol.status = LpStatus::infeasible;
    sol.iterations = simplex.iterations();
    return sol;
  }
  const auto outcome = simplex.phase_two();
  sol.iterations = simplex.iterations();
  sol.x = simplex.structural();
  sol.objective = problem.c.dot(sol.x);
  if (outcome == Outcome::unbounded) {
    sol.status = LpStatus::unbounded;
    sol.objective = -kInf;
    return sol;
  }
  sol.status = LpStatus::optimal;
  const Vector y = simplex.row_duals();
  const Index p = problem.A_eq.rows();
  sol.dual_eq = y.head(p);
  sol.dual_ineq = y.tail(problem.A_ineq.rows());
  sol.reduced_costs = problem.c;
  if (p > 0) sol.reduced_costs -= problem.A_eq.transpose() * sol.dual_eq;
  if (problem.A_ineq.rows() > 0) sol.reduced_costs -= problem.A_ineq.transpose() * sol.dual_ineq;
  return sol;
}

double lp_dual_objective(const LpProblem& problem, const LpSolution& solution) {
  double value = problem.b_eq.dot(solution.dual_eq) + problem.b_ineq.dot(solution.dual_ineq);
  for (Index j = 0; j < problem.num_vars(); ++j) {
    const double d = solution.reduced_costs[j];
    if (d == 0.0) continue;
    const double bound = d > 0.0 ? problem.lower[j] : problem.upper[j];
    if (std::isfinite(bound)) value += d * bound;
    else if (std::abs(d) > 1e-9) return -kInf;  // dual infeasible
  }
  return value;
}

FeasibilityResult lp_feasible(const LpProblem& problem, const LpTolerances& tol) {
  problem.validate();
  BoundedSimplex simplex(problem, tol);
  FeasibilityResult result;
  result.feasible = simplex.phase_one();
  result.infeasibility = simplex.infeasibility();
  if (result.feasible) result.witness = simplex.structural();
  return result;
}

}  // namespace binrec
