#pragma once

#include "binrec/ensembles.hpp"
#include "binrec/optim.hpp"
#include "binrec/types.hpp"

#include <optional>
#include <string_view>

namespace binrec {

enum class Program { box_bp, box_bp_mirror, mibi_bp, robust_box_bp, box_ls };

std::string_view to_string(Program program);
Program parse_program(std::string_view name);

enum class SolveStatus { optimal, infeasible, not_converged, failed };

std::string_view to_string(SolveStatus status);

enum class Branch { plain, mirror };

struct RecoveryProblem {
  Matrix A;
  Vector b;
  std::optional<double> eta;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  /// Throws ConfigError when b.size() != A.rows() or eta < 0.
  void validate() const;
};

struct RecoveryReport {
  Vector x_hat;  // empty when the program is infeasible
  Program program = Program::box_bp;
  double objective = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::optional<Branch> branch_chosen;
  Index iterations = 0;

  bool has_solution() const { return x_hat.size() > 0 || status == SolveStatus::optimal; }
};

struct RecoveryOptions {
  LpTolerances lp;
  BoxLsOptions box_ls;
  double admm_tol = 1e-8;
  Index admm_max_iter = 20000;
};

// On the box [0,1]^N, ||x||_1 = sum(x) and ||1 - x||_1 = N - sum(x), so the
// two basis-pursuit programs below are linear programs.

/// min ||x||_1  s.t.  Ax = b, x in [0,1]^N.
RecoveryReport box_bp(const RecoveryProblem& p, const RecoveryOptions& opt = {});

/// min ||1 - x||_1  s.t.  Ax = b, x in [0,1]^N.
RecoveryReport box_bp_mirror(const RecoveryProblem& p, const RecoveryOptions& opt = {});

/// Runs both programs and keeps the candidate closest to its own rounding
/// (ties go to the plain branch).
RecoveryReport mibi_bp(const RecoveryProblem& p, const RecoveryOptions& opt = {});

/// min ||x||_1  s.t.  ||Ax - b||_2 <= eta, x in [0,1]^N. ADMM on the split
/// Ax - b = z with z in the eta-ball; the x-step is a box QP. eta = 0 is
/// the equality-constrained program and is delegated to box_bp.
RecoveryReport robust_box_bp(const RecoveryProblem& p, const RecoveryOptions& opt = {});

/// min ||Ax - b||_2 over [0,1]^N.
RecoveryReport box_ls(const RecoveryProblem& p, const RecoveryOptions& opt = {});

RecoveryReport run_program(Program program, const RecoveryProblem& p, const RecoveryOptions& opt = {});

/// Nearest integer per entry; halves round up.
Eigen::VectorXi round_to_binary(const Vector& x);

/// ||x_hat - x0||_2 <= tol * max(1, ||x0||_2).
bool recovery_success(const Vector& x_hat, const BinarySignal& x0, double tol = 1e-4);

/// True iff box_bp returns x0 AND x0 is the only optimal point. The second
/// condition is checked with one more LP over the optimal face: if another
/// optimal point exists, walking from x0 toward it until the box boundary
/// gives an optimal point with <2*x0 - 1, x - x0> <= -1.
bool box_bp_recovers_uniquely(const Matrix& A, const BinarySignal& x0, const RecoveryOptions& opt = {});

}  // namespace binrec
