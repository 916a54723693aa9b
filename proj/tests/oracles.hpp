// Test-only reference implementations, independent of the solver internals.
#pragma once

#include <optional>

#include <Eigen/QR>

#include "mopf/qp.hpp"

namespace oracles {

using mopf::Mat;
using mopf::Vec;

struct BruteResult {
  double objective = 0;
  Vec x;
};

// Try every subset of inequality rows as the active set, solve the KKT
// equality system it induces and keep the best candidate that is primal
// feasible, dual feasible and stationary. Tractable for <= ~14 rows.
inline std::optional<BruteResult> qp_active_set_enumeration(
    const mopf::qp::Problem& P, double tol = 1e-7) {
  const int n = P.num_vars(), m = P.num_ineq(), p = P.num_eq();
  if (m > 16) throw std::invalid_argument("too many rows for enumeration");
  std::optional<BruteResult> best;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> S;
    for (int r = 0; r < m; ++r)
      if (mask & (1u << r)) S.push_back(r);
    const int k = static_cast<int>(S.size()) + p;
    Mat K = Mat::Zero(n + k, n + k);
    Vec rhs = Vec::Zero(n + k);
    K.topLeftCorner(n, n) = P.H;
    rhs.head(n) = -P.f;
    for (int j = 0; j < static_cast<int>(S.size()); ++j) {
      K.block(n + j, 0, 1, n) = P.A.row(S[j]);
      K.block(0, n + j, n, 1) = P.A.row(S[j]).transpose();
      rhs[n + j] = P.b[S[j]];
    }
    for (int j = 0; j < p; ++j) {
      const int row = n + static_cast<int>(S.size()) + j;
      K.block(row, 0, 1, n) = P.Aeq.row(j);
      K.block(0, row, n, 1) = P.Aeq.row(j).transpose();
      rhs[row] = P.beq[j];
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(K);
    Vec sol = cod.solve(rhs);
    if ((K * sol - rhs).lpNorm<Eigen::Infinity>() > tol) continue;
    Vec x = sol.head(n);
    bool ok = true;
    for (int r = 0; r < m && ok; ++r)
      if (P.A.row(r).dot(x) - P.b[r] > tol) ok = false;
    for (int j = 0; j < static_cast<int>(S.size()) && ok; ++j)
      if (sol[n + j] < -tol) ok = false;
    if (!ok) continue;
    const double obj = 0.5 * x.dot(P.H * x) + P.f.dot(x);
    if (!best || obj < best->objective - 1e-12) best = BruteResult{obj, x};
  }
  return best;
}

// Enumerate all basic feasible solutions of an LP (H == 0) and return the
// best vertex. Assumes the equality rows are linearly independent.
inline std::optional<BruteResult> lp_vertex_enumeration(
    const mopf::qp::Problem& P, double tol = 1e-7) {
  const int n = P.num_vars(), m = P.num_ineq(), p = P.num_eq();
  const int need = n - p;
  if (need < 0 || m > 20) throw std::invalid_argument("bad LP for enumeration");
  std::optional<BruteResult> best;
  std::vector<int> comb(need);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == need) {
      Mat S(n, n);
      Vec rhs(n);
      for (int j = 0; j < p; ++j) {
        S.row(j) = P.Aeq.row(j);
        rhs[j] = P.beq[j];
      }
      for (int j = 0; j < need; ++j) {
        S.row(p + j) = P.A.row(comb[j]);
        rhs[p + j] = P.b[comb[j]];
      }
      Eigen::FullPivLU<Mat> lu(S);
      if (!lu.isInvertible()) return;
      Vec x = lu.solve(rhs);
      for (int r = 0; r < m; ++r)
        if (P.A.row(r).dot(x) - P.b[r] > tol) return;
      const double obj = P.f.dot(x);
      if (!best || obj < best->objective - 1e-12) best = BruteResult{obj, x};
      return;
    }
    for (int r = start; r < m; ++r) {
      comb[depth] = r;
      rec(r + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace oracles
