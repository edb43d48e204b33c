#pragma once

#include "binrec/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace binrec {

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

/// min c'x  s.t.  A_eq x = b_eq,  A_ineq x <= b_ineq,  lower <= x <= upper.
/// Bounds may be infinite. Empty A_eq / A_ineq must still have n columns
/// (use Matrix(0, n)).
struct LpProblem {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ineq;
  Vector b_ineq;
  Vector lower;
  Vector upper;

  /// Problem with n variables, no rows, and bounds [lower, upper].
  static LpProblem with_bounds(Index n, double lower, double upper);

  Index num_vars() const { return c.size(); }
  /// Throws ConfigError on inconsistent dimensions or lower > upper.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vector x;  // valid when optimal (last iterate when unbounded)
  double objective = 0.0;
  Vector dual_eq;
  Vector dual_ineq;
  /// c - A_eq' y_eq - A_ineq' y_ineq.
  Vector reduced_costs;
  /// Sum of artificial values at the end of phase 1.
  double phase1_infeasibility = 0.0;
  Index iterations = 0;
};

struct LpTolerances {
  double feas = 1e-9;
  double opt = 1e-9;   // relative to 1 + max|c|
  double pivot = 1e-11;
};

/// Bounded-variable primal simplex (dense tableau, two phases, Dantzig
/// pricing with a switch to Bland's rule after 5n consecutive degenerate
/// pivots). Throws SolverError on numerical breakdown.
LpSolution solve_lp(const LpProblem& problem, const LpTolerances& tol = {});

/// Dual objective b'y + sum over bounds of the reduced-cost contributions.
/// Equals the primal objective at an optimal basis (weak duality check).
double lp_dual_objective(const LpProblem& problem, const LpSolution& solution);

struct FeasibilityResult {
  bool feasible = false;
  std::optional<Vector> witness;
  double infeasibility = 0.0;
};

/// Phase 1 only.
FeasibilityResult lp_feasible(const LpProblem& problem, const LpTolerances& tol = {});

// ---------------------------------------------------------------------------
// Box-constrained least squares
// ---------------------------------------------------------------------------

struct BoxLsOptions {
  double tol = 1e-10;       // on the projected-gradient fixed-point residual
  Index max_iter = 0;       // 0 means 50 * N
  int power_iterations = 30;
  bool record_objective = false;
};

struct BoxLsResult {
  Vector x;
  double residual_norm = 0.0;  // ||Ax - b||_2
  double fixed_point_residual = 0.0;
  Index iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // filled when record_objective
};

/// min ||Ax - b||_2 over lower <= x <= upper. Accelerated projected gradient
/// (step 1/L, L from power iteration) with restart whenever the objective
/// would increase, plus an active-face least-squares refinement. The result
/// is then polished by a bounded-variable active-set method started on the face
/// of the gradient iterate, kept only if it reaches a KKT point without raising the
/// residual. converged reports the final fixed-point residual against tol.
BoxLsResult solve_box_ls(const Matrix& A, const Vector& b, const Vector& lower, const Vector& upper,
                         const BoxLsOptions& options = {});

/// min 0.5*||Ax - b||^2 + linear'x over the box, optionally warm-started.
BoxLsResult solve_box_qp(const Matrix& A, const Vector& b, const Vector& linear, const Vector& lower,
                         const Vector& upper, const Vector* start, const BoxLsOptions& options = {});

/// Largest eigenvalue of A'A estimated by power iteration.
double estimate_lipschitz(const Matrix& A, int iterations);

}  // namespace binrec
