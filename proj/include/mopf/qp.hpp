#pragma once

#include <optional>
#include <string>

#include "mopf/types.hpp"

namespace mopf::qp {

/// Central tolerance record shared by the solver and its checkers.
struct Tolerances {
  double feasibility = 1e-8;
  double stationarity = 1e-8;
  double activity = 1e-8;
  /// Slack allowed on the smallest eigenvalue when validating H.
  double psd = 1e-9;
  /// Validate problem invariants (symmetry, PSD, shapes) before solving.
  bool validate = true;
  /// 0 selects an automatic cap based on problem size.
  int max_iterations = 0;
};

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

std::string to_string(Status s);

/// min 1/2 x'Hx + f'x  s.t.  A x <= b,  Aeq x = beq.
///
/// Rows may carry a finite penalty weight instead of being enforced:
/// a soft inequality row r costs soft[r] * max(A_r x - b_r, 0) and a soft
/// equality row costs eq_soft[r] * |Aeq_r x - beq_r|. Empty penalty vectors
/// mean every row is hard. Soft rows are how penalized reformulations are
/// solved without materializing slack variables.
struct Problem {
  Mat H;
  Vec f;
  Mat A;
  Vec b;
  Mat Aeq;
  Vec beq;
  Vec soft;     // size 0 or A.rows(); +inf marks a hard row
  Vec eq_soft;  // size 0 or Aeq.rows()

  int num_vars() const { return static_cast<int>(f.size()); }
  int num_ineq() const { return static_cast<int>(b.size()); }
  int num_eq() const { return static_cast<int>(beq.size()); }
  bool is_soft_row(int r) const {
    return soft.size() > 0 && std::isfinite(soft[r]);
  }
  bool is_soft_eq(int r) const {
    return eq_soft.size() > 0 && std::isfinite(eq_soft[r]);
  }

  /// Throws std::invalid_argument listing every violated invariant.
  void validate(const Tolerances& tol = {}) const;

  static Problem lp(Vec f, Mat A, Vec b, Mat Aeq = Mat(), Vec beq = Vec());
};

struct Solution {
  Status status = Status::IterLimit;
  Vec x;
  Vec ineq_duals;  // lambda >= 0, one per inequality row
  Vec eq_duals;    // nu, one per equality row
  /// Rows satisfied with equality within the activity tolerance, ascending.
  IndexList active_set;
  IndexList inactive_set;
  /// Includes penalty charges of violated soft rows.
  double objective = 0.0;
  /// Rank-deficient active rows, or an active row with a zero multiplier.
  bool degenerate = false;
  /// Infeasible only: y >= 0, z with y'A + z'Aeq = 0 and y'b + z'beq < 0.
  Vec farkas_ineq;
  Vec farkas_eq;
  /// Unbounded only: feasible descent ray from x.
  Vec ray;
  int iterations = 0;
};

/// Primal active-set method; exact active sets and multipliers on exit.
Solution solve(const Problem& problem, const Tolerances& tol = {});

/// LP entry point; requires a zero Hessian. Drives the solution to a vertex
/// of the feasible set whenever one exists so the basis is reported.
Solution solve_lp(const Problem& problem, const Tolerances& tol = {});

/// Independent KKT residual computation; shares no state with the solver.
struct KktReport {
  double stationarity = 0;  // ||Hx + f + A'lambda + Aeq'nu||_inf
  double primal = 0;        // max hard-row violation
  double dual = 0;          // max multiplier bound violation
  double comp_slack = 0;    // max |lambda_r * residual_r| outside bounds
  bool ok(const Tolerances& tol = {}) const;
};

KktReport check_kkt(const Problem& problem, const Solution& sol);

}  // namespace mopf::qp
