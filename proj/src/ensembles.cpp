#include "binrec/ensembles.hpp"

#include "binrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace binrec {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

}  // namespace

void EnsembleConfig::validate() const {
  if (m < 1 || N < 1) throw ConfigError("ensemble: m and N must be positive");
  if (kind != EnsembleKind::biased) return;
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ConfigError("ensemble: mu must be finite and >= 0");
  if (!(sigma > 0.0) || !(lambda_bound > 0.0))
    throw ConfigError("ensemble: sigma and lambda must be positive");
  if (sigma > lambda_bound) throw ConfigError("ensemble: sigma must not exceed lambda");
  if (base == BaseDistribution::uniform_bounded && kSqrt3 * sigma > lambda_bound * (1.0 + 1e-12))
    throw ConfigError("ensemble: uniform base needs sqrt(3)*sigma <= lambda");
}

EntryStatistics entry_statistics(const EnsembleConfig& config) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.m));
  switch (config.kind) {
    case EnsembleKind::gaussian:
      return {0.0, scale, std::numeric_limits<double>::infinity()};
    case EnsembleKind::rademacher:
      return {0.0, scale, scale};
    case EnsembleKind::bernoulli01:
      return {0.5 * scale, 0.5 * scale, 0.5 * scale};
    case EnsembleKind::biased: {
      const double s = config.normalize ? scale : 1.0;
      const double half_width =
          config.base == BaseDistribution::rademacher_scaled ? config.sigma : kSqrt3 * config.sigma;
      return {config.mu * s, config.sigma * s, half_width * s};
    }
  }
  return {};
}

BinarySignal::BinarySignal(Index N, std::vector<Index> support) : n_(N), support_(std::move(support)) {
  if (N < 0) throw ConfigError("signal: negative dimension");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] < 0 || support_[i] >= N) throw ConfigError("signal: support index out of range");
    if (i > 0 && support_[i] <= support_[i - 1])
      throw ConfigError("signal: support must be strictly increasing");
  }
}

bool BinarySignal::contains(Index i) const {
  return std::binary_search(support_.begin(), support_.end(), i);
}

Vector BinarySignal::dense() const {
  Vector x = Vector::Zero(n_);
  for (Index i : support_) x[i] = 1.0;
  return x;
}

BinarySignal BinarySignal::complement() const {
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(n_ - sparsity()));
  std::size_t pos = 0;
  for (Index i = 0; i < n_; ++i) {
    if (pos < support_.size() && support_[pos] == i) {
      ++pos;
      continue;
    }
    rest.push_back(i);
  }
  return BinarySignal(n_, std::move(rest));
}

DenseMatrix gen_matrix(const EnsembleConfig& config) {
  config.validate();
  const Index m = config.m;
  const Index n = config.N;
  const std::uint64_t seed = config.seed;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));

  Matrix a(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      const auto uj = static_cast<std::uint64_t>(j);
      double v = 0.0;
      switch (config.kind) {
        case EnsembleKind::gaussian:
          v = scale * rng::normal_at(seed, ui, uj);
          break;
        case EnsembleKind::rademacher:
          v = scale * rng::sign_at(seed, ui, uj);
          break;
        case EnsembleKind::bernoulli01:
          // (1 + sign)/2 from the Rademacher sign stream.
          v = rng::sign_at(seed, ui, uj) > 0.0 ? scale : 0.0;
          break;
        case EnsembleKind::biased: {
          double d = 0.0;
          if (config.base == BaseDistribution::rademacher_scaled) {
            d = config.sigma * rng::sign_at(seed, ui, uj);
          } else {
            d = kSqrt3 * config.sigma * (2.0 * rng::uniform_at(seed, ui, uj) - 1.0);
          }
          v = config.mu + d;
          if (config.normalize) v *= scale;
          break;
        }
      }
      a(i, j) = v;
    }
  }
  return DenseMatrix{std::move(a), config};
}

BinarySignal gen_sparse_binary(Index N, Index k, std::uint64_t seed) {
  if (N < 0) throw ConfigError("gen_sparse_binary: negative dimension");
  if (k < 0 || k > N) throw DomainError("gen_sparse_binary: need 0 <= k <= N");
  std::vector<Index> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), Index{0});
  rng::Stream stream(rng::derive(seed, 0x5157));
  for (Index i = 0; i < k; ++i) {
    const auto remaining = static_cast<std::uint64_t>(N - i);
    const auto j = i + static_cast<Index>(stream.below(remaining));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  perm.resize(static_cast<std::size_t>(k));
  std::sort(perm.begin(), perm.end());
  return BinarySignal(N, std::move(perm));
}

Vector gen_noise(Index m, double eps, std::uint64_t seed) {
  if (m < 0) throw ConfigError("gen_noise: negative dimension");
  if (!(eps >= 0.0)) throw DomainError("gen_noise: eps must be nonnegative");
  Vector n = Vector::Zero(m);
  if (eps == 0.0 || m == 0) return n;
  rng::Stream stream(rng::derive(seed, 0x7015e));
  double norm = 0.0;
  while (norm == 0.0) {
    for (Index i = 0; i < m; ++i) n[i] = stream.normal();
    norm = n.norm();
  }
  n *= eps / norm;
  // One correction step pins the norm to the last ulp.
  n *= eps / n.norm();
  return n;
}

Matrix centered_part(const DenseMatrix& a) {
  if (!a.provenance) throw ConfigError("centered_part: matrix has no ensemble provenance");
  const double mu = entry_statistics(*a.provenance).mu;
  return a.values.array() - mu;
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::gaussian: return "gaussian";
    case EnsembleKind::rademacher: return "rademacher";
    case EnsembleKind::bernoulli01: return "bernoulli01";
    case EnsembleKind::biased: return "biased";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "gaussian") return EnsembleKind::gaussian;
  if (name == "rademacher") return EnsembleKind::rademacher;
  if (name == "bernoulli01" || name == "bernoulli") return EnsembleKind::bernoulli01;
  if (name == "biased") return EnsembleKind::biased;
  throw ConfigError("unknown ensemble kind: " + std::string(name));
}

std::string_view to_string(BaseDistribution base) {
  return base == BaseDistribution::rademacher_scaled ? "rademacher" : "uniform";
}

BaseDistribution parse_base_distribution(std::string_view name) {
  if (name == "rademacher" || name == "rademacher_scaled") return BaseDistribution::rademacher_scaled;
  if (name == "uniform" || name == "uniform_bounded") return BaseDistribution::uniform_bounded;
  throw ConfigError("unknown base distribution: " + std::string(name));
}

}  // namespace binrec
