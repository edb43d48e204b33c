#pragma once

#include "binrec/types.hpp"

#include <optional>
#include <string_view>

namespace binrec {

struct TheoryParams {
  Index N = 0;
  Index k = 0;
  Index m = 0;
  double mu = 0.0;
  double sigma = 1.0;
  double lambda_bound = 1.0;
  double eps = 0.05;
  /// Constant behind the asymptotic sample bound.
  double C = 1.0;
  /// Certificate offset; -sigma^2/(4 mu) when empty.
  std::optional<double> rho;

  /// Throws ConfigError unless 0 <= k <= N and eps in (0,1).
  void validate() const;
  double rho_value() const;
};

// Truncated second moments of the standard normal:
//   L(tau) = int_{-inf}^{tau} (u - tau)^2 phi(u) du = (1 + tau^2) Phi(tau) + tau phi(tau)
//   U(tau) = int_{tau}^{inf}  (u - tau)^2 phi(u) du = (1 + tau^2) Phi(-tau) - tau phi(tau)
double delta_lower_moment(double tau);
double delta_upper_moment(double tau);
/// k L(tau) + (N - k) U(tau).
double delta_objective(double k, double N, double tau);

/// inf over tau >= 0 of delta_objective. Throws DomainError unless 0 <= k <= N.
double delta_bin(Index k, Index N);

/// P_ij = 2^{1-j} sum_{l=0}^{i-1} C(j-1, l); P_0j = 0. Throws DomainError
/// unless 0 <= i <= j and j >= 1.
double face_survival_prob(Index i, Index j);

/// min(delta_bin(k), delta_bin(N-k)) + sqrt(8 log(4/eps) N).
double mibi_sample_bound(Index k, Index N, double eps);

/// C * max(Lambda^2/mu^2, min(k, N-k) Lambda^4/sigma^4) * log(N/eps).
double biased_sample_bound(const TheoryParams& p);

enum class CertFailureVariant { off_support, on_support, combined };

std::string_view to_string(CertFailureVariant variant);
CertFailureVariant parse_cert_failure_variant(std::string_view name);

/// Failure probability of the explicit certificate with |J| = k, clamped
/// to [0, 1].
double cert_failure_prob(const TheoryParams& p, CertFailureVariant variant);

struct CertNormBound {
  /// Bound on ||nu||_2 in the stated form: m (rho^2 + sigma^2 (|J| + 1/|J|)).
  double stated = 0.0;
  /// Bound on ||nu||_2^2 as derived: m (rho^2 + Lambda^2 (|J| + 1/|J|)).
  double derived_squared = 0.0;
};

CertNormBound cert_norm_bound(const TheoryParams& p);

/// sqrt(9 (16 sigma^2/mu^2 + min(k, N-k)) / (m sigma^2)).
double noise_error_bound(const TheoryParams& p);

enum class LargerHalfVariant { density, rademacher };

std::string_view to_string(LargerHalfVariant variant);
LargerHalfVariant parse_larger_half_variant(std::string_view name);

/// 1 - P_{N-m,N}, times (1 - 2^{-m/2}) for the Rademacher variant.
/// Throws DomainError unless N/2 < m <= N.
double larger_half_success_prob(Index N, Index m, LargerHalfVariant variant);

}  // namespace binrec
