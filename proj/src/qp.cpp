#include "mopf/qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mopf::qp {

namespace {

enum class IneqState { Inactive, Kink, Violated };
enum class EqState { Pinned, ViolPlus, ViolMinus };

struct WorkingSet {
  IndexList ineq;  // kink rows currently pinning the iterate
  IndexList eq;    // pinned equality rows
};

double penalty_of(const Vec& weights, int r) {
  return weights.size() > 0 ? weights[r] : kInf;
}

/// Greedy lowest-index selection of rows independent of the rows already
/// held in `basis` (orthonormal columns spanning the selected row space).
bool try_append_independent(Mat& basis, int& count, const Vec& row,
                            double tol = 1e-10) {
  Vec r = row;
  if (count > 0) {
    r -= basis.leftCols(count) * (basis.leftCols(count).transpose() * row);
    // re-orthogonalize once for stability
    r -= basis.leftCols(count) * (basis.leftCols(count).transpose() * r);
  }
  const double scale = std::max(1.0, row.norm());
  if (r.norm() <= tol * scale) return false;
  if (count == basis.cols()) return false;
  basis.col(count) = r / r.norm();
  ++count;
  return true;
}

struct Engine {
  const Problem& P;
  const Tolerances& tol;
  int n, m, p;
  Vec x;
  Vec resid;     // A x - b
  Vec eq_resid;  // Aeq x - beq
  std::vector<IneqState> istate;
  std::vector<EqState> estate;
  WorkingSet ws;
  int iterations = 0;
  int stalled = 0;  // consecutive near-zero steps, triggers Bland's rule
  bool bland = false;

  Engine(const Problem& prob, const Tolerances& t)
      : P(prob), tol(t), n(prob.num_vars()), m(prob.num_ineq()),
        p(prob.num_eq()) {}

  double objective(const Vec& xx) const {
    double v = 0.5 * xx.dot(P.H * xx) + P.f.dot(xx);
    for (int r = 0; r < m; ++r) {
      const double u = penalty_of(P.soft, r);
      if (std::isfinite(u)) v += u * std::max(P.A.row(r).dot(xx) - P.b[r], 0.0);
    }
    for (int r = 0; r < p; ++r) {
      const double u = penalty_of(P.eq_soft, r);
      if (std::isfinite(u)) v += u * std::abs(P.Aeq.row(r).dot(xx) - P.beq[r]);
    }
    return v;
  }

  void refresh_residuals() {
    resid = m > 0 ? Vec(P.A * x - P.b) : Vec(0);
    eq_resid = p > 0 ? Vec(P.Aeq * x - P.beq) : Vec(0);
  }

  Vec effective_gradient() const {
    Vec g = P.H * x + P.f;
    for (int r = 0; r < m; ++r)
      if (istate[r] == IneqState::Violated)
        g += penalty_of(P.soft, r) * P.A.row(r).transpose();
    for (int r = 0; r < p; ++r) {
      if (estate[r] == EqState::ViolPlus)
        g += penalty_of(P.eq_soft, r) * P.Aeq.row(r).transpose();
      else if (estate[r] == EqState::ViolMinus)
        g -= penalty_of(P.eq_soft, r) * P.Aeq.row(r).transpose();
    }
    return g;
  }

  Mat working_stack() const {
    Mat S(ws.eq.size() + ws.ineq.size(), n);
    Index k = 0;
    for (int r : ws.eq) S.row(k++) = P.Aeq.row(r);
    for (int r : ws.ineq) S.row(k++) = P.A.row(r);
    return S;
  }

  Mat null_basis(const Mat& S) const {
    if (S.rows() == 0) return Mat::Identity(n, n);
    Eigen::FullPivLU<Mat> lu(S);
    lu.setThreshold(1e-11);
    Mat K = lu.kernel();
    if (K.cols() == 1 && K.isZero(0)) return Mat(n, 0);
    // orthonormalize for conditioning
    Eigen::HouseholderQR<Mat> qr(K);
    Mat Q = qr.householderQ() * Mat::Identity(n, K.cols());
    return Q;
  }

  /// Initialize working set from the current point: pin all hard equalities,
  /// then soft equalities and inequality rows sitting at their kink, keeping
  /// rows independent (lowest index first).
  void initialize_states() {
    istate.assign(m, IneqState::Inactive);
    estate.assign(p, EqState::Pinned);
    ws.ineq.clear();
    ws.eq.clear();
    refresh_residuals();

    Mat basis(n, n);
    int count = 0;
    for (int r = 0; r < p; ++r) {
      if (P.is_soft_eq(r) && eq_resid[r] > tol.activity) {
        estate[r] = EqState::ViolPlus;
        continue;
      }
      if (P.is_soft_eq(r) && eq_resid[r] < -tol.activity) {
        estate[r] = EqState::ViolMinus;
        continue;
      }
      if (try_append_independent(basis, count, P.Aeq.row(r).transpose()))
        ws.eq.push_back(r);
      // dependent (consistent) equality rows are implied; multiplier 0
    }
    for (int r = 0; r < m; ++r) {
      if (resid[r] > tol.activity) {
        istate[r] = IneqState::Violated;  // only soft rows may start violated
        continue;
      }
      if (resid[r] >= -tol.activity &&
          try_append_independent(basis, count, P.A.row(r).transpose())) {
        istate[r] = IneqState::Kink;
        ws.ineq.push_back(r);
      }
    }
  }

  void add_ineq_to_working(int r) {
    istate[r] = IneqState::Kink;
    ws.ineq.insert(std::upper_bound(ws.ineq.begin(), ws.ineq.end(), r), r);
  }

  void pin_eq(int r) {
    estate[r] = EqState::Pinned;
    ws.eq.insert(std::upper_bound(ws.eq.begin(), ws.eq.end(), r), r);
  }

  struct Crossing {
    double alpha = kInf;
    int row = -1;     // inequality row, or -1
    int eq_row = -1;  // equality row, or -1
  };

  Crossing first_crossing(const Vec& d) const {
    Crossing c;
    const double dtol = 1e-13;
    auto consider = [&](double a, int row, int eq_row) {
      a = std::max(a, 0.0);
      if (a < c.alpha * (1.0 - 1e-12) - 1e-15) {
        c.alpha = a;
        c.row = row;
        c.eq_row = eq_row;
      }
      // near-ties resolve to the lowest inequality row index
      else if (c.row >= 0 && row >= 0 && a <= c.alpha + 1e-15 && row < c.row) {
        c.alpha = std::min(c.alpha, a);
        c.row = row;
      }
    };
    Vec Ad = m > 0 ? Vec(P.A * d) : Vec(0);
    for (int r = 0; r < m; ++r) {
      if (istate[r] == IneqState::Kink) continue;
      const double dr = Ad[r];
      if (istate[r] == IneqState::Inactive && dr > dtol)
        consider(-resid[r] / dr, r, -1);
      else if (istate[r] == IneqState::Violated && dr < -dtol)
        consider(-resid[r] / dr, r, -1);
    }
    if (p > 0) {
      Vec Ed = P.Aeq * d;
      for (int r = 0; r < p; ++r) {
        if (estate[r] == EqState::Pinned) continue;
        const double dr = Ed[r];
        if (estate[r] == EqState::ViolPlus && dr < -dtol)
          consider(-eq_resid[r] / dr, -1, r);
        else if (estate[r] == EqState::ViolMinus && dr > dtol)
          consider(-eq_resid[r] / dr, -1, r);
      }
    }
    return c;
  }

  void take_step(const Vec& d, double alpha) {
    x += alpha * d;
    refresh_residuals();
    if (alpha * d.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + x.norm()))
      ++stalled;
    else
      stalled = 0;
    if (stalled > 2 * (m + p) + 20) bland = true;
  }

  /// Least-squares multipliers for the working rows against gradient g.
  Vec working_multipliers(const Mat& S, const Vec& g) const {
    if (S.rows() == 0) return Vec(0);
    return S.transpose().colPivHouseholderQr().solve(-g);
  }

  /// One release per stationary point: index into [eq rows | ineq rows] of
  /// the multiplier-bound violation to drop, or -1 when dual feasible.
  int pick_release(const Vec& mu, double gnorm, double* direction) const {
    const double dtol = 1e-10 * (1.0 + gnorm);
    int best = -1;
    double worst = dtol;
    const int ne = static_cast<int>(ws.eq.size());
    for (int k = 0; k < ne + static_cast<int>(ws.ineq.size()); ++k) {
      double viol = 0.0, dir = 0.0;
      if (k < ne) {
        const int r = ws.eq[k];
        const double u = penalty_of(P.eq_soft, r);
        if (!std::isfinite(u)) continue;
        if (mu[k] > u + dtol) viol = mu[k] - u, dir = +1;
        else if (mu[k] < -u - dtol) viol = -u - mu[k], dir = -1;
      } else {
        const int r = ws.ineq[k - ne];
        const double u = penalty_of(P.soft, r);
        if (mu[k] < -dtol) viol = -mu[k], dir = -1;
        else if (std::isfinite(u) && mu[k] > u + dtol) viol = mu[k] - u, dir = +1;
      }
      if (viol <= 0) continue;
      if (bland) {  // lowest global row index wins
        best = k;
        *direction = dir;
        break;
      }
      if (viol > worst) {
        worst = viol;
        best = k;
        *direction = dir;
      }
    }
    return best;
  }

  void release(int k, double dir) {
    const int ne = static_cast<int>(ws.eq.size());
    if (k < ne) {
      const int r = ws.eq[k];
      ws.eq.erase(ws.eq.begin() + k);
      estate[r] = dir > 0 ? EqState::ViolPlus : EqState::ViolMinus;
    } else {
      const int r = ws.ineq[k - ne];
      ws.ineq.erase(ws.ineq.begin() + (k - ne));
      istate[r] = dir > 0 ? IneqState::Violated : IneqState::Inactive;
    }
  }

  /// Pin flat directions of the optimal face so LPs end at a vertex and
  /// penalized problems report fully determined active sets.
  void crash_to_vertex() {
    for (int guard = 0; guard <= n; ++guard) {
      Mat S = working_stack();
      Mat Z = null_basis(S);
      if (Z.cols() == 0) return;
      Mat Hz = Z.transpose() * P.H * Z;
      Eigen::SelfAdjointEigenSolver<Mat> eig(Hz);
      const double emax = Hz.rows() ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
      const double thresh = 1e-10 * std::max(1.0, emax);
      bool moved = false;
      for (Index j = 0; j < eig.eigenvalues().size() && !moved; ++j) {
        if (eig.eigenvalues()[j] > thresh) continue;
        Vec d = Z * eig.eigenvectors().col(j);
        for (double sign : {1.0, -1.0}) {
          Crossing c = first_crossing(sign * d);
          if (!std::isfinite(c.alpha)) continue;
          take_step(sign * d, c.alpha);
          if (c.row >= 0) add_ineq_to_working(c.row);
          else pin_eq(c.eq_row);
          moved = true;
          break;
        }
      }
      if (!moved) return;
    }
  }

  Solution finish_optimal(const Vec& mu) {
    crash_to_vertex();
    // recompute multipliers after the crash (working set may have grown)
    Mat S = working_stack();
    Vec g = effective_gradient();
    Vec mu2 = working_multipliers(S, g);
    (void)mu;
    Solution sol;
    sol.status = Status::Optimal;
    sol.x = x;
    sol.iterations = iterations;
    sol.objective = objective(x);
    sol.ineq_duals = Vec::Zero(m);
    sol.eq_duals = Vec::Zero(p);
    const int ne = static_cast<int>(ws.eq.size());
    for (int k = 0; k < ne; ++k) sol.eq_duals[ws.eq[k]] = mu2[k];
    for (size_t k = 0; k < ws.ineq.size(); ++k) {
      double lam = mu2[ne + static_cast<int>(k)];
      const int r = ws.ineq[k];
      const double u = penalty_of(P.soft, r);
      lam = std::clamp(lam, 0.0, std::isfinite(u) ? u : kInf);
      sol.ineq_duals[r] = lam;
    }
    for (int r = 0; r < m; ++r)
      if (istate[r] == IneqState::Violated)
        sol.ineq_duals[r] = penalty_of(P.soft, r);
    for (int r = 0; r < p; ++r) {
      if (estate[r] == EqState::ViolPlus)
        sol.eq_duals[r] = penalty_of(P.eq_soft, r);
      else if (estate[r] == EqState::ViolMinus)
        sol.eq_duals[r] = -penalty_of(P.eq_soft, r);
    }
    // active set: every row satisfied with equality within tolerance,
    // lowest index first
    Mat basis(n, n);
    int count = 0;
    for (int r : ws.eq) try_append_independent(basis, count, P.Aeq.row(r).transpose());
    bool rank_deficient = false;
    for (int r = 0; r < m; ++r) {
      if (std::abs(resid[r]) <= tol.activity) {
        sol.active_set.push_back(r);
        if (!try_append_independent(basis, count, P.A.row(r).transpose()))
          rank_deficient = true;
        if (sol.ineq_duals[r] <= tol.activity) sol.degenerate = true;
      } else {
        sol.inactive_set.push_back(r);
      }
    }
    if (rank_deficient) sol.degenerate = true;
    return sol;
  }

  Solution run() {
    initialize_states();
    const int cap = tol.max_iterations > 0 ? tol.max_iterations
                                           : 200 * (n + m + p) + 2000;
    while (iterations++ < cap) {
      Vec g = effective_gradient();
      Mat S = working_stack();
      Mat Z = null_basis(S);
      Vec d = Vec::Zero(n);
      bool flat = false;
      if (Z.cols() > 0) {
        Mat Hz = Z.transpose() * P.H * Z;
        Vec gz = Z.transpose() * g;
        Eigen::SelfAdjointEigenSolver<Mat> eig(Hz);
        const double emax =
            Hz.rows() ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
        const double thresh = 1e-10 * std::max(1.0, emax);
        Vec q = Vec::Zero(Z.cols());
        Vec flat_part = Vec::Zero(Z.cols());
        for (Index j = 0; j < eig.eigenvalues().size(); ++j) {
          const double lam = eig.eigenvalues()[j];
          const double coef = eig.eigenvectors().col(j).dot(gz);
          if (lam > thresh) q -= (coef / lam) * eig.eigenvectors().col(j);
          else flat_part += coef * eig.eigenvectors().col(j);
        }
        const double gscale = 1.0 + g.lpNorm<Eigen::Infinity>();
        if (flat_part.lpNorm<Eigen::Infinity>() > tol.stationarity * gscale) {
          d = -Z * flat_part;
          flat = true;
        } else {
          d = Z * q;
        }
      }
      const double step_scale = 1.0 + x.lpNorm<Eigen::Infinity>();
      if (!flat && d.lpNorm<Eigen::Infinity>() <= 1e-12 * step_scale) {
        // stationary on the current face: check multiplier bounds
        Vec mu = working_multipliers(S, g);
        double dir = 0.0;
        int k = pick_release(mu, g.lpNorm<Eigen::Infinity>(), &dir);
        if (k < 0) return finish_optimal(mu);
        release(k, dir);
        continue;
      }
      Crossing c = first_crossing(d);
      double alpha = flat ? c.alpha : std::min(1.0, c.alpha);
      if (!std::isfinite(alpha)) {
        Solution sol;
        sol.status = Status::Unbounded;
        sol.x = x;
        sol.ray = d;
        sol.iterations = iterations;
        sol.objective = -kInf;
        return sol;
      }
      take_step(d, alpha);
      if (alpha == c.alpha) {
        if (c.row >= 0) add_ineq_to_working(c.row);
        else if (c.eq_row >= 0) pin_eq(c.eq_row);
      }
    }
    Solution sol;
    sol.status = Status::IterLimit;
    sol.x = x;
    sol.iterations = iterations;
    sol.objective = objective(x);
    return sol;
  }
};

bool needs_phase1(const Problem& P, const Vec& x0, const Tolerances& tol) {
  for (int r = 0; r < P.num_ineq(); ++r)
    if (!P.is_soft_row(r) && P.A.row(r).dot(x0) - P.b[r] > tol.feasibility)
      return true;
  for (int r = 0; r < P.num_eq(); ++r)
    if (!P.is_soft_eq(r) &&
        std::abs(P.Aeq.row(r).dot(x0) - P.beq[r]) > tol.feasibility)
      return true;
  return false;
}

/// Minimize the total violation of the hard rows; soft rows are irrelevant
/// to feasibility and are excluded entirely.
Problem phase1_problem(const Problem& P, IndexList* hard_ineq,
                       IndexList* hard_eq) {
  Problem ph;
  ph.H = Mat::Zero(P.num_vars(), P.num_vars());
  ph.f = Vec::Zero(P.num_vars());
  for (int r = 0; r < P.num_ineq(); ++r)
    if (!P.is_soft_row(r)) hard_ineq->push_back(r);
  for (int r = 0; r < P.num_eq(); ++r)
    if (!P.is_soft_eq(r)) hard_eq->push_back(r);
  ph.A.resize(hard_ineq->size(), P.num_vars());
  ph.b.resize(hard_ineq->size());
  for (size_t k = 0; k < hard_ineq->size(); ++k) {
    ph.A.row(k) = P.A.row((*hard_ineq)[k]);
    ph.b[k] = P.b[(*hard_ineq)[k]];
  }
  ph.Aeq.resize(hard_eq->size(), P.num_vars());
  ph.beq.resize(hard_eq->size());
  for (size_t k = 0; k < hard_eq->size(); ++k) {
    ph.Aeq.row(k) = P.Aeq.row((*hard_eq)[k]);
    ph.beq[k] = P.beq[(*hard_eq)[k]];
  }
  ph.soft = Vec::Ones(ph.b.size());
  ph.eq_soft = Vec::Ones(ph.beq.size());
  return ph;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterLimit: return "iteration-limit";
  }
  return "?";
}

void Problem::validate(const Tolerances& tol) const {
  std::ostringstream err;
  const int n = num_vars();
  if (H.rows() != n || H.cols() != n)
    err << "H must be " << n << "x" << n << "; ";
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n))
    err << "A/b shapes disagree; ";
  if (Aeq.rows() != beq.size() || (Aeq.rows() > 0 && Aeq.cols() != n))
    err << "Aeq/beq shapes disagree; ";
  if (soft.size() != 0 && soft.size() != b.size())
    err << "soft must be empty or match A rows; ";
  if (eq_soft.size() != 0 && eq_soft.size() != beq.size())
    err << "eq_soft must be empty or match Aeq rows; ";
  if (H.rows() == n && H.cols() == n && n > 0) {
    if ((H - H.transpose()).lpNorm<Eigen::Infinity>() >
        1e-9 * std::max(1.0, H.lpNorm<Eigen::Infinity>()))
      err << "H not symmetric; ";
    else {
      Eigen::SelfAdjointEigenSolver<Mat> eig(H, Eigen::EigenvaluesOnly);
      const double lmin = eig.eigenvalues().minCoeff();
      const double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
      if (lmin < -tol.psd * std::max(1.0, lmax))
        err << "H not positive semidefinite (min eig " << lmin << "); ";
    }
  }
  std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("invalid QP: " + msg);
}

Problem Problem::lp(Vec f, Mat A, Vec b, Mat Aeq, Vec beq) {
  Problem P;
  const Index n = f.size();
  P.H = Mat::Zero(n, n);
  P.f = std::move(f);
  P.A = std::move(A);
  P.b = std::move(b);
  P.Aeq = Aeq.size() ? std::move(Aeq) : Mat(0, n);
  P.beq = std::move(beq);
  return P;
}

Solution solve(const Problem& problem, const Tolerances& tol) {
  if (tol.validate) problem.validate(tol);
  Vec x0 = Vec::Zero(problem.num_vars());
  if (needs_phase1(problem, x0, tol)) {
    IndexList hard_ineq, hard_eq;
    Problem ph = phase1_problem(problem, &hard_ineq, &hard_eq);
    Engine e1(ph, tol);
    e1.x = x0;
    Solution s1 = e1.run();
    const double total_violation = s1.objective;
    if (total_violation > std::max<double>(1, hard_ineq.size() + hard_eq.size()) *
                              tol.feasibility * 10) {
      Solution sol;
      sol.status = Status::Infeasible;
      sol.x = s1.x;
      sol.iterations = s1.iterations;
      sol.farkas_ineq = Vec::Zero(problem.num_ineq());
      sol.farkas_eq = Vec::Zero(problem.num_eq());
      for (size_t k = 0; k < hard_ineq.size(); ++k)
        sol.farkas_ineq[hard_ineq[k]] = s1.ineq_duals[k];
      for (size_t k = 0; k < hard_eq.size(); ++k)
        sol.farkas_eq[hard_eq[k]] = s1.eq_duals[k];
      return sol;
    }
    x0 = s1.x;
  }
  Engine e(problem, tol);
  e.x = x0;
  return e.run();
}

Solution solve_lp(const Problem& problem, const Tolerances& tol) {
  if (problem.H.size() > 0 && !problem.H.isZero(0))
    throw std::invalid_argument("solve_lp requires a zero Hessian");
  return solve(problem, tol);
}

bool KktReport::ok(const Tolerances& tol) const {
  return stationarity <= tol.stationarity && primal <= tol.feasibility &&
         dual <= tol.stationarity && comp_slack <= 10 * tol.feasibility;
}

KktReport check_kkt(const Problem& P, const Solution& sol) {
  KktReport rep;
  const Vec& x = sol.x;
  Vec g = P.H * x + P.f;
  if (P.num_ineq() > 0) g += P.A.transpose() * sol.ineq_duals;
  if (P.num_eq() > 0) g += P.Aeq.transpose() * sol.eq_duals;
  rep.stationarity = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  for (int r = 0; r < P.num_ineq(); ++r) {
    const double res = P.A.row(r).dot(x) - P.b[r];
    const double u = penalty_of(P.soft, r);
    const double lam = sol.ineq_duals[r];
    if (!std::isfinite(u)) rep.primal = std::max(rep.primal, res);
    rep.dual = std::max(rep.dual, -lam);
    if (std::isfinite(u)) rep.dual = std::max(rep.dual, lam - u);
    // complementarity: residual may only be nonzero at a multiplier bound
    if (res < 0) rep.comp_slack = std::max(rep.comp_slack, std::min(lam, -res));
    if (res > 0) {
      const double gap = std::isfinite(u) ? u - lam : kInf;
      rep.comp_slack = std::max(rep.comp_slack, std::min(gap, res));
    }
  }
  for (int r = 0; r < P.num_eq(); ++r) {
    const double res = std::abs(P.Aeq.row(r).dot(x) - P.beq[r]);
    const double u = penalty_of(P.eq_soft, r);
    if (!std::isfinite(u)) rep.primal = std::max(rep.primal, res);
    else {
      rep.dual = std::max(rep.dual, std::abs(sol.eq_duals[r]) - u);
      if (res > 0)
        rep.comp_slack = std::max(
            rep.comp_slack, std::min(res, u - std::abs(sol.eq_duals[r])));
    }
  }
  return rep;
}

}  // namespace mopf::qp
