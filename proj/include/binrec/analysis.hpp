#pragma once

#include "binrec/ensembles.hpp"
#include "binrec/optim.hpp"
#include "binrec/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace binrec {

enum class ConeSign { nonpos, nonneg, zero, free };

/// Polyhedral cone given by per-coordinate sign constraints and an optional
/// sum(w) <= 0 half-space.
struct ConeSpec {
  std::vector<ConeSign> signs;
  bool sum_nonpos = false;

  Index size() const { return static_cast<Index>(signs.size()); }

  /// H_K: w_i <= 0 on K, w_i >= 0 off K.
  static ConeSpec house(const BinarySignal& K);
  /// H_K intersected with {sum(w) <= 0}.
  static ConeSpec bnsp(const BinarySignal& K);

  /// Coordinatewise intersection; the sum constraint is kept if either has it.
  ConeSpec intersect(const ConeSpec& other) const;
};

enum class Verdict { holds, fails };

std::string_view to_string(Verdict verdict);

struct CertificateResult {
  Verdict verdict = Verdict::holds;
  /// Kernel checks: nonzero kernel element in the cone when the verdict is
  /// fails. Dual checks: v when the verdict is holds.
  std::optional<Vector> witness;
  /// Kernel checks: phase-1 infeasibility of the witness LP (0 when it
  /// fails). Dual checks: min_i |(A'v)_i| (0 when it fails).
  double margin = 0.0;
};

/// Decides whether ker(A) meets the cone only at 0, using the LP
/// {Aw = 0, cone constraints, l1 norm of the signed part = 1} and, for the
/// free coordinates, a rank test. Witnesses are scaled to ||w||_1 = 1.
CertificateResult check_kernel_cone(const Matrix& A, const ConeSpec& cone, const LpTolerances& tol = {});

/// Looks for v with A'v in the open cone H_K^+; the strict inequalities are
/// replaced by a unit margin.
CertificateResult check_hkplus_dual(const Matrix& A, const BinarySignal& K, const LpTolerances& tol = {});

/// -sigma^2 / (4 mu). Throws DomainError when mu == 0.
double default_rho(double mu, double sigma);

// Threshold choices for the certificate margin t.
double certificate_threshold(Index m, double sigma);          // m sigma^2 / 36
double certificate_threshold_loose(Index m, double sigma);    // m sigma^2 / 32
double certificate_threshold_coarse(Index m, double sigma);   // m sigma^2 / 6

/// nu = rho*1 + D e - <D e, 1>/m * 1 with e = 1_J. D is the centered part
/// of the measurement matrix.
Vector build_dual_certificate(const Matrix& D, double mu, double sigma, const BinarySignal& J,
                              std::optional<double> rho_override = std::nullopt);

struct CertificateCheck {
  bool holds = false;
  /// -(A'nu)_i - t on K and (A'nu)_i - t off K; all positive iff holds.
  Vector margins;
  double min_margin = 0.0;
};

/// (A'nu)_i < -t on K and (A'nu)_i > t off K.
CertificateCheck verify_certificate(const Matrix& A, const Vector& nu, const BinarySignal& K, double t);

/// The explicit construction certifies the sign pattern of its own support
/// with flipped signs, so for the sparse target 1_K (J = K) it is negated
/// before checking.
CertificateCheck verify_support_certificate(const Matrix& A, const Vector& nu, const BinarySignal& K, double t);

struct SingularValueBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on min ||Ax||_2 over unit vectors of H_K. The lower bound comes
/// from a dual certificate (the LP witness, or `certificate` if it verifies
/// with a larger ratio); the upper bound from sampled sign-respecting unit
/// vectors, coordinate directions, and the kernel witness if one exists.
SingularValueBounds restricted_sv_bounds(const Matrix& A, const BinarySignal& K, Index num_samples,
                                         std::uint64_t seed,
                                         const std::optional<Vector>& certificate = std::nullopt);

}  // namespace binrec
