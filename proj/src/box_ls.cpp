#include "binrec/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace binrec {

namespace {

constexpr double kFaceTolerance = 1e-3;
constexpr Index kRefineEvery = 200;
constexpr Index kCheckEvery = 10;

struct Box {
  const Vector& lower;
  const Vector& upper;

  Vector clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

  Vector start_point(Index n) const {
    Vector x(n);
    for (Index i = 0; i < n; ++i) {
      const bool lo = std::isfinite(lower[i]);
      const bool hi = std::isfinite(upper[i]);
      if (lo && hi) x[i] = 0.5 * (lower[i] + upper[i]);
      else x[i] = std::clamp(0.0, lower[i], upper[i]);
    }
    return x;
  }
};

class BoxQp {
 public:
  BoxQp(const Matrix& A, const Vector& b, const Vector& linear, const Box& box)
      : A_(A), b_(b), linear_(linear), box_(box) {}

  double objective(const Vector& x) const {
    return 0.5 * (A_ * x - b_).squaredNorm() + linear_.dot(x);
  }

  Vector gradient(const Vector& x) const { return A_.transpose() * (A_ * x - b_) + linear_; }

  double fixed_point_residual(const Vector& x, double step) const {
    return (x - box_.clamp(x - step * gradient(x))).norm();
  }

  // Snaps coordinates near a bound onto it and solves the remaining free
  // least-squares problem exactly (minimum-norm correction). Returns the
  // refined point if it stays in the box, else x unchanged.
  Vector refine_on_face(const Vector& x) const {
    const Index n = x.size();
    Vector z = x;
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i) {
      const double width = box_.upper[i] - box_.lower[i];
      const double delta = std::isfinite(width) ? kFaceTolerance * width : kFaceTolerance;
      if (x[i] - box_.lower[i] <= delta) z[i] = box_.lower[i];
      else if (box_.upper[i] - x[i] <= delta) z[i] = box_.upper[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      const auto nf = static_cast<Index>(free.size());
      Matrix af(A_.rows(), nf);
      Vector lin_f(nf);
      for (Index k = 0; k < nf; ++k) {
        af.col(k) = A_.col(free[static_cast<std::size_t>(k)]);
        lin_f[k] = linear_[free[static_cast<std::size_t>(k)]];
      }
      const Vector r = b_ - A_ * z;
      Vector step;
      if (lin_f.isZero(0.0)) {
        step = af.completeOrthogonalDecomposition().solve(r);
      } else {
        const Matrix normal = af.transpose() * af;
        const Vector rhs = af.transpose() * r - lin_f;
        step = normal.completeOrthogonalDecomposition().solve(rhs);
      }
      for (Index k = 0; k < nf; ++k) {
        const Index i = free[static_cast<std::size_t>(k)];
        const double v = z[i] + step[k];
        const double slack = 1e-12 * (1.0 + std::abs(v));
        if (v < box_.lower[i] - slack || v > box_.upper[i] + slack) return x;
        z[i] = std::clamp(v, box_.lower[i], box_.upper[i]);
      }
    }
    return z;
  }

 private:
  const Matrix& A_;
  const Vector& b_;
  const Vector& linear_;
  const Box& box_;
};

// Bounded-variable least squares (Lawson-Hanson with two-sided bounds),
// started on the face of x: coordinates sitting on a bound stay there, the
// rest start free. Finishes exactly where gradient methods crawl. Returns
// nothing if it does not reach a KKT point.
std::optional<Vector> active_set_polish(const Matrix& A, const Vector& b, const Box& box, const Vector& x_start) {
  const Index n = A.cols();
  enum class S : std::uint8_t { lower, upper, free };
  std::vector<S> state(static_cast<std::size_t>(n));
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    const double width = box.upper[i] - box.lower[i];
    const double near = 1e-9 * (std::isfinite(width) ? width : 1.0 + std::abs(x_start[i]));
    auto& s = state[static_cast<std::size_t>(i)];
    if (x_start[i] - box.lower[i] <= near) {
      s = S::lower;
      x[i] = box.lower[i];
    } else if (box.upper[i] - x_start[i] <= near) {
      s = S::upper;
      x[i] = box.upper[i];
    } else {
      s = S::free;
      x[i] = x_start[i];
    }
  }

  const double scale = 1.0 + A.cwiseAbs().maxCoeff() * (b.lpNorm<1>() + A.cwiseAbs().rowwise().sum().sum());
  const double kkt_tol = 1e-13 * scale;

  // Minimizes over the free coordinates, stepping back onto the box when the
  // unconstrained minimizer leaves it.
  auto settle_free = [&]() {
    for (Index guard = 0; guard <= n; ++guard) {
      std::vector<Index> f;
      for (Index i = 0; i < n; ++i)
        if (state[static_cast<std::size_t>(i)] == S::free) f.push_back(i);
      if (f.empty()) return;
      const auto nf = static_cast<Index>(f.size());
      Matrix af(A.rows(), nf);
      for (Index k = 0; k < nf; ++k) af.col(k) = A.col(f[static_cast<std::size_t>(k)]);
      const Vector r = b - A * x;
      const Vector step = af.completeOrthogonalDecomposition().solve(r);
      double alpha = 1.0;
      for (Index k = 0; k < nf; ++k) {
        const Index i = f[static_cast<std::size_t>(k)];
        if (step[k] < 0.0 && std::isfinite(box.lower[i]))
          alpha = std::min(alpha, (x[i] - box.lower[i]) / -step[k]);
        else if (step[k] > 0.0 && std::isfinite(box.upper[i]))
          alpha = std::min(alpha, (box.upper[i] - x[i]) / step[k]);
      }
      alpha = std::max(alpha, 0.0);
      for (Index k = 0; k < nf; ++k) x[f[static_cast<std::size_t>(k)]] += alpha * step[k];
      if (alpha >= 1.0) return;
      for (Index k = 0; k < nf; ++k) {
        const Index i = f[static_cast<std::size_t>(k)];
        const double tol = 1e-12 * (1.0 + std::abs(x[i]));
        if (std::isfinite(box.lower[i]) && x[i] <= box.lower[i] + tol) {
          x[i] = box.lower[i];
          state[static_cast<std::size_t>(i)] = S::lower;
        } else if (std::isfinite(box.upper[i]) && x[i] >= box.upper[i] - tol) {
          x[i] = box.upper[i];
          state[static_cast<std::size_t>(i)] = S::upper;
        }
      }
    }
  };

  for (Index outer = 0; outer < 3 * n + 10; ++outer) {
    settle_free();
    const Vector g = A.transpose() * (A * x - b);
    Index enter = -1;
    double worst = kkt_tol;
    for (Index i = 0; i < n; ++i) {
      const S s = state[static_cast<std::size_t>(i)];
      const double w = s == S::lower ? -g[i] : s == S::upper ? g[i] : 0.0;
      if (w > worst) {
        worst = w;
        enter = i;
      }
    }
    if (enter < 0) return x;
    state[static_cast<std::size_t>(enter)] = S::free;
  }
  return std::nullopt;
}

void check_dimensions(const Matrix& A, const Vector& b, const Vector& linear, const Vector& lower,
                      const Vector& upper) {
  const Index n = A.cols();
  if (b.size() != A.rows()) throw ConfigError("box_ls: b must have A.rows() entries");
  if (linear.size() != n || lower.size() != n || upper.size() != n)
    throw ConfigError("box_ls: vector lengths must match A.cols()");
  for (Index i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("box_ls: lower bound exceeds upper bound");
}

}  // namespace

double estimate_lipschitz(const Matrix& A, int iterations) {
  const Index n = A.cols();
  if (n == 0 || A.rows() == 0) return 0.0;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(n);
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const Vector av = A * v;
    lambda = std::max(lambda, av.squaredNorm());
    Vector w = A.transpose() * av;
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
  }
  return std::max(lambda, (A * v).squaredNorm());
}

BoxLsResult solve_box_qp(const Matrix& A, const Vector& b, const Vector& linear, const Vector& lower,
                         const Vector& upper, const Vector* start, const BoxLsOptions& options) {
  check_dimensions(A, b, linear, lower, upper);
  const Index n = A.cols();
  const Box box{lower, upper};
  const BoxQp qp(A, b, linear, box);
  const Index max_iter = options.max_iter > 0 ? options.max_iter : std::max<Index>(50 * n, 50);

  BoxLsResult result;
  Vector x = start != nullptr ? box.clamp(*start) : box.start_point(n);

  double lipschitz = 1.01 * estimate_lipschitz(A, options.power_iterations);
  if (lipschitz == 0.0) {
    // Pure linear objective over the box.
    for (Index i = 0; i < n; ++i) {
      if (linear[i] > 0.0) x[i] = lower[i];
      else if (linear[i] < 0.0) x[i] = upper[i];
    }
    result.x = x;
    result.residual_norm = (A * x - b).norm();
    result.converged = x.allFinite();
    return result;
  }
  double step = 1.0 / lipschitz;

  double fx = qp.objective(x);
  if (options.record_objective) result.objective_trace.push_back(fx);
  Vector y = x;
  double t = 1.0;
  bool converged = false;
  Index k = 0;

  auto try_refine = [&]() {
    const Vector z = qp.refine_on_face(x);
    const double fz = qp.objective(z);
    if (fz <= fx) {
      x = z;
      fx = fz;
      y = x;
      t = 1.0;
    }
  };

  while (k < max_iter) {
    ++k;
    const Vector x_new = box.clamp(y - step * qp.gradient(y));
    const double f_new = qp.objective(x_new);
    if (f_new > fx) {
      if (t > 1.0) {
        // Drop momentum and retry from x.
        y = x;
        t = 1.0;
      } else {
        // Uphill plain step: rounding-level stall, or the Lipschitz estimate was low.
        if (f_new - fx <= 1e-13 * (1.0 + std::abs(fx))) break;
        lipschitz *= 2.0;
        step = 1.0 / lipschitz;
      }
      continue;
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    x = x_new;
    fx = f_new;
    t = t_new;
    if (options.record_objective) result.objective_trace.push_back(fx);

    if (k % kCheckEvery == 0 && qp.fixed_point_residual(x, step) <= options.tol) {
      converged = true;
      break;
    }
    if (k % kRefineEvery == 0) {
      try_refine();
      if (options.record_objective) result.objective_trace.push_back(fx);
    }
  }

  result.fixed_point_residual = qp.fixed_point_residual(x, step);
  if (!converged && result.fixed_point_residual > options.tol) {
    try_refine();
    if (options.record_objective) result.objective_trace.push_back(fx);
    result.fixed_point_residual = qp.fixed_point_residual(x, step);
  }
  result.converged = result.fixed_point_residual <= options.tol;
  result.iterations = k;
  result.residual_norm = (A * x - b).norm();
  result.x = std::move(x);
  return result;
}

BoxLsResult solve_box_ls(const Matrix& A, const Vector& b, const Vector& lower, const Vector& upper,
                         const BoxLsOptions& options) {
  const Vector linear = Vector::Zero(A.cols());
  BoxLsResult result = solve_box_qp(A, b, linear, lower, upper, nullptr, options);
  if (A.cols() == 0 || A.rows() == 0) return result;

  const Box box{lower, upper};
  const auto polished = active_set_polish(A, b, box, result.x);
  if (!polished) return result;
  const double r_new = (A * *polished - b).norm();
  if (r_new > result.residual_norm * (1.0 + 1e-12) + 1e-15) return result;
  result.x = *polished;
  result.residual_norm = r_new;
  if (options.record_objective) result.objective_trace.push_back(0.5 * r_new * r_new);
  const double step = 1.0 / std::max(estimate_lipschitz(A, options.power_iterations), 1e-300);
  result.fixed_point_residual = (result.x - box.clamp(result.x - step * (A.transpose() * (A * result.x - b)))).norm();
  result.converged = result.fixed_point_residual <= options.tol;
  return result;
}

}  // namespace binrec
