#include "binrec/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace binrec {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kGridStep = 0.1;
constexpr double kTauMax = 20.0;
constexpr double kGoldenTol = 1e-10;
constexpr Index kExactLimit = 60;

double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double log_binomial(double n, double l) {
  return std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
}

}  // namespace

void TheoryParams::validate() const {
  if (N < 0 || k < 0 || k > N) throw ConfigError("theory: need 0 <= k <= N");
  if (m < 0) throw ConfigError("theory: m must be nonnegative");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("theory: eps must lie in (0, 1)");
  if (!(sigma > 0.0) || !(lambda_bound > 0.0)) throw ConfigError("theory: sigma and Lambda must be positive");
}

double TheoryParams::rho_value() const {
  if (rho) return *rho;
  if (mu == 0.0) throw DomainError("theory: rho is undefined for mu = 0");
  return -sigma * sigma / (4.0 * mu);
}

double delta_lower_moment(double tau) { return (1.0 + tau * tau) * normal_cdf(tau) + tau * phi(tau); }

double delta_upper_moment(double tau) { return (1.0 + tau * tau) * normal_cdf(-tau) - tau * phi(tau); }

double delta_objective(double k, double N, double tau) {
  return k * delta_lower_moment(tau) + (N - k) * delta_upper_moment(tau);
}

double delta_bin(Index k, Index N) {
  if (N < 0 || k < 0 || k > N) throw DomainError("delta_bin: need 0 <= k <= N");
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(N);
  auto f = [&](double tau) { return delta_objective(kd, nd, tau); };

  const int steps = static_cast<int>(std::lround(kTauMax / kGridStep));
  int best = 0;
  double best_value = f(0.0);
  for (int i = 1; i <= steps; ++i) {
    const double v = f(i * kGridStep);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = std::max(0, best - 1) * kGridStep;
  double b = std::min(steps, best + 1) * kGridStep;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kGoldenTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({best_value, fc, fd, f(0.5 * (a + b))});
}

double face_survival_prob(Index i, Index j) {
  if (j < 1 || i < 0 || i > j) throw DomainError("face_survival_prob: need 0 <= i <= j and j >= 1");
  if (i == 0) return 0.0;
  if (i == j) return 1.0;
  if (j <= kExactLimit) {
    unsigned __int128 term = 1;
    unsigned __int128 sum = 0;
    const auto n = static_cast<unsigned>(j - 1);
    for (unsigned l = 0; l < static_cast<unsigned>(i); ++l) {
      sum += term;
      term = term * (n - l) / (l + 1);
    }
    return std::ldexp(static_cast<double>(sum), static_cast<int>(1 - j));
  }
  const auto n = static_cast<double>(j - 1);
  std::vector<double> logs(static_cast<std::size_t>(i));
  for (Index l = 0; l < i; ++l) logs[static_cast<std::size_t>(l)] = log_binomial(n, static_cast<double>(l));
  const double peak = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - peak);
  return clamp01(std::exp(peak + std::log(acc) + (1.0 - static_cast<double>(j)) * std::log(2.0)));
}

double mibi_sample_bound(Index k, Index N, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("mibi_sample_bound: eps must lie in (0, 1)");
  const double delta = std::min(delta_bin(k, N), delta_bin(N - k, N));
  return delta + std::sqrt(8.0 * std::log(4.0 / eps) * static_cast<double>(N));
}

double biased_sample_bound(const TheoryParams& p) {
  p.validate();
  if (p.mu == 0.0) throw DomainError("biased_sample_bound: the bound is vacuous for mu = 0");
  const double l2 = p.lambda_bound * p.lambda_bound;
  const double s4 = std::pow(p.sigma, 4);
  const auto kmin = static_cast<double>(std::min(p.k, p.N - p.k));
  const double factor = std::max(l2 / (p.mu * p.mu), kmin * l2 * l2 / s4);
  return p.C * factor * std::log(static_cast<double>(p.N) / p.eps);
}

std::string_view to_string(CertFailureVariant variant) {
  switch (variant) {
    case CertFailureVariant::off_support: return "off_support";
    case CertFailureVariant::on_support: return "on_support";
    case CertFailureVariant::combined: return "combined";
  }
  return "unknown";
}

CertFailureVariant parse_cert_failure_variant(std::string_view name) {
  if (name == "off_support" || name == "off-support") return CertFailureVariant::off_support;
  if (name == "on_support" || name == "on-support") return CertFailureVariant::on_support;
  if (name == "combined") return CertFailureVariant::combined;
  throw ConfigError("unknown certificate failure variant: " + std::string(name));
}

double cert_failure_prob(const TheoryParams& p, CertFailureVariant variant) {
  p.validate();
  if (p.k < 1 || p.m < 1) throw DomainError("cert_failure_prob: need |J| >= 1 and m >= 1");
  const auto m = static_cast<double>(p.m);
  const auto j = static_cast<double>(p.k);
  const auto n = static_cast<double>(p.N);
  const double mu2 = p.mu * p.mu;
  const double l2 = p.lambda_bound * p.lambda_bound;
  const double l4 = l2 * l2;
  switch (variant) {
    case CertFailureVariant::combined: {
      const double s4 = std::pow(p.sigma, 4);
      return clamp01(n * (std::exp(-m * mu2 / (32.0 * l2)) + std::exp(-m * s4 / (2048.0 * j * l4)) +
                          std::exp(-m * m * s4 / (2048.0 * j * l4))));
    }
    case CertFailureVariant::off_support: {
      const double r2 = p.rho_value() * p.rho_value();
      return clamp01((n - j) * (std::exp(-m * mu2 / (32.0 * l2)) + std::exp(-m * r2 * mu2 / (32.0 * j * l4)) +
                                std::exp(-m * m * r2 * mu2 / (32.0 * j * l4))));
    }
    case CertFailureVariant::on_support: {
      const double r2 = p.rho_value() * p.rho_value();
      return clamp01(j * (std::exp(-m * mu2 / (2.0 * l2)) + std::exp(-m * r2 * mu2 / (2.0 * j * l4)) +
                          std::exp(-m * m * r2 * mu2 / (2.0 * j * l4))));
    }
  }
  return 1.0;
}

CertNormBound cert_norm_bound(const TheoryParams& p) {
  p.validate();
  if (p.k < 1) throw DomainError("cert_norm_bound: need |J| >= 1");
  const double r2 = p.rho_value() * p.rho_value();
  const auto m = static_cast<double>(p.m);
  const double jj = static_cast<double>(p.k) + 1.0 / static_cast<double>(p.k);
  return {m * (r2 + p.sigma * p.sigma * jj), m * (r2 + p.lambda_bound * p.lambda_bound * jj)};
}

double noise_error_bound(const TheoryParams& p) {
  p.validate();
  if (p.mu == 0.0 || p.m == 0) throw DomainError("noise_error_bound: need mu != 0 and m >= 1");
  const double s2 = p.sigma * p.sigma;
  const auto kmin = static_cast<double>(std::min(p.k, p.N - p.k));
  return std::sqrt(9.0 * (16.0 * s2 / (p.mu * p.mu) + kmin) / (static_cast<double>(p.m) * s2));
}

std::string_view to_string(LargerHalfVariant variant) {
  return variant == LargerHalfVariant::density ? "density" : "rademacher";
}

LargerHalfVariant parse_larger_half_variant(std::string_view name) {
  if (name == "density") return LargerHalfVariant::density;
  if (name == "rademacher") return LargerHalfVariant::rademacher;
  throw ConfigError("unknown variant: " + std::string(name));
}

double larger_half_success_prob(Index N, Index m, LargerHalfVariant variant) {
  if (N < 1 || 2 * m <= N || m > N) throw DomainError("larger_half_success_prob: need N/2 < m <= N");
  double p = 1.0 - face_survival_prob(N - m, N);
  if (variant == LargerHalfVariant::rademacher) p *= 1.0 - std::exp2(-0.5 * static_cast<double>(m));
  return clamp01(p);
}

}  // namespace binrec
