#pragma once

#include "binrec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace binrec {

enum class EnsembleKind { gaussian, rademacher, bernoulli01, biased };

/// Distribution of the centered part D of a biased matrix A = mu*1 + D.
enum class BaseDistribution { rademacher_scaled, uniform_bounded };

struct EnsembleConfig {
  EnsembleKind kind = EnsembleKind::gaussian;
  Index m = 1;
  Index N = 1;
  double mu = 0.0;  // biased only
  BaseDistribution base = BaseDistribution::rademacher_scaled;
  double sigma = 1.0;
  double lambda_bound = 1.0;
  std::uint64_t seed = 0;
  /// Biased only: multiply the whole matrix by m^{-1/2}. The three named
  /// ensembles are always normalized.
  bool normalize = false;

  /// Throws ConfigError when the invariants are violated.
  void validate() const;
};

/// Entry statistics of a generated matrix after any normalization.
struct EntryStatistics {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda_bound = 0.0;  // +inf for Gaussian entries
};

EntryStatistics entry_statistics(const EnsembleConfig& config);

struct DenseMatrix {
  Matrix values;
  std::optional<EnsembleConfig> provenance;  // empty for external matrices

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

/// x0 = 1_K for a sorted support K.
class BinarySignal {
 public:
  BinarySignal() = default;
  /// Throws ConfigError unless indices are strictly increasing and < N.
  BinarySignal(Index N, std::vector<Index> support);

  Index size() const { return n_; }
  Index sparsity() const { return static_cast<Index>(support_.size()); }
  const std::vector<Index>& support() const { return support_; }
  bool contains(Index i) const;

  Vector dense() const;
  /// 1 - 1_K = 1_{K^c}.
  BinarySignal complement() const;

  friend bool operator==(const BinarySignal&, const BinarySignal&) = default;

 private:
  Index n_ = 0;
  std::vector<Index> support_;
};

DenseMatrix gen_matrix(const EnsembleConfig& config);

/// Uniformly random k-subset of [N] (partial Fisher-Yates). Throws DomainError if k > N.
BinarySignal gen_sparse_binary(Index N, Index k, std::uint64_t seed);

/// Uniform direction on the sphere scaled to norm eps exactly.
Vector gen_noise(Index m, double eps, std::uint64_t seed);

/// A - mu*1 for an ensemble matrix (mu taken from its entry statistics).
Matrix centered_part(const DenseMatrix& a);

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view name);
std::string_view to_string(BaseDistribution base);
BaseDistribution parse_base_distribution(std::string_view name);

}  // namespace binrec
