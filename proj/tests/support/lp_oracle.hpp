#pragma once

// Brute-force LP reference: enumerate every basic solution of a small
// bounded LP and keep the best feasible one.

#include "binrec/optim.hpp"
#include "binrec/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace binrec::testing {

struct OracleResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Vector x;
};

// Active-set candidates: all equality rows, plus n - p further constraints
// chosen among inequality rows and variable bounds. Requires finite bounds
// and A_eq of full row rank.
inline OracleResult enumerate_vertices(const LpProblem& lp, double feas_tol = 1e-9) {
  const Index n = lp.num_vars();
  const Index p = lp.A_eq.rows();
  const Index q = lp.A_ineq.rows();
  struct Row {
    Vector a;
    double b;
  };
  std::vector<Row> pool;
  for (Index i = 0; i < q; ++i) pool.push_back({lp.A_ineq.row(i).transpose(), lp.b_ineq[i]});
  for (Index j = 0; j < n; ++j) {
    pool.push_back({Vector::Unit(n, j), lp.lower[j]});
    pool.push_back({Vector::Unit(n, j), lp.upper[j]});
  }
  const Index need = n - p;
  OracleResult best;
  if (need < 0) return best;

  auto feasible = [&](const Vector& x) {
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (p > 0 && ((lp.A_eq * x - lp.b_eq).cwiseAbs().maxCoeff() > feas_tol * scale * 10)) return false;
    if (q > 0 && ((lp.A_ineq * x - lp.b_ineq).maxCoeff() > feas_tol * scale * 10)) return false;
    for (Index j = 0; j < n; ++j)
      if (x[j] < lp.lower[j] - feas_tol * scale || x[j] > lp.upper[j] + feas_tol * scale) return false;
    return true;
  };

  std::vector<Index> pick(static_cast<std::size_t>(need));
  const auto pool_size = static_cast<Index>(pool.size());
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == need) {
      Matrix M(n, n);
      Vector rhs(n);
      if (p > 0) {
        M.topRows(p) = lp.A_eq;
        rhs.head(p) = lp.b_eq;
      }
      for (Index r = 0; r < need; ++r) {
        const Row& row = pool[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
        M.row(p + r) = row.a.transpose();
        rhs[p + r] = row.b;
      }
      Eigen::FullPivLU<Matrix> lu(M);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(rhs);
      if (!feasible(x)) return;
      const double obj = lp.c.dot(x);
      if (!best.feasible || obj < best.objective) {
        best.feasible = true;
        best.objective = obj;
        best.x = x;
      }
      return;
    }
    for (Index i = start; i <= pool_size - (need - depth); ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (n == 0) return best;
  rec(0, 0);
  return best;
}

// Small random LP with finite bounds and full-row-rank equalities. About
// three quarters are feasible by construction; integer data makes
// degenerate vertices common.
inline LpProblem random_small_lp(std::uint64_t seed) {
  rng::Stream s(seed);
  const auto n = static_cast<Index>(1 + s.below(8));
  const auto p = static_cast<Index>(s.below(static_cast<std::uint64_t>(std::min<Index>(4, n) + 1)));
  const auto q = static_cast<Index>(s.below(3));
  const bool integer = s.below(2) == 0;
  auto entry = [&]() {
    return integer ? static_cast<double>(static_cast<int>(s.below(7)) - 3) : s.normal();
  };
  LpProblem lp;
  lp.c.resize(n);
  for (Index j = 0; j < n; ++j) lp.c[j] = entry();
  lp.lower.resize(n);
  lp.upper.resize(n);
  for (Index j = 0; j < n; ++j) {
    lp.lower[j] = integer ? -static_cast<double>(s.below(3)) : -2.0 * s.uniform();
    lp.upper[j] = lp.lower[j] + (integer ? static_cast<double>(1 + s.below(3)) : 0.5 + 2.5 * s.uniform());
  }
  Vector inside(n);
  for (Index j = 0; j < n; ++j) {
    const double u = integer ? static_cast<double>(s.below(3)) / 2.0 : s.uniform();
    inside[j] = lp.lower[j] + u * (lp.upper[j] - lp.lower[j]);
  }
  const bool make_feasible = s.below(4) != 0;
  do {
    lp.A_eq.resize(p, n);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < n; ++j) lp.A_eq(i, j) = entry();
  } while (p > 0 && Eigen::FullPivLU<Matrix>(lp.A_eq).rank() < p);
  lp.A_ineq.resize(q, n);
  for (Index i = 0; i < q; ++i)
    for (Index j = 0; j < n; ++j) lp.A_ineq(i, j) = entry();
  if (make_feasible) {
    lp.b_eq = lp.A_eq * inside;
    lp.b_ineq = lp.A_ineq * inside;
    for (Index i = 0; i < q; ++i) lp.b_ineq[i] += integer ? static_cast<double>(s.below(2)) : s.uniform();
  } else {
    lp.b_eq.resize(p);
    for (Index i = 0; i < p; ++i) lp.b_eq[i] = 4.0 * entry();
    lp.b_ineq.resize(q);
    for (Index i = 0; i < q; ++i) lp.b_ineq[i] = entry();
  }
  return lp;
}

}  // namespace binrec::testing
