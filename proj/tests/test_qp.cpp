#include "mopf/qp.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace mopf;
namespace qp = mopf::qp;

namespace {

qp::Problem make_qp(Mat H, Vec f, Mat A, Vec b, Mat Aeq = Mat(), Vec beq = Vec()) {
  qp::Problem P;
  const Index n = f.size();
  P.H = std::move(H);
  P.f = std::move(f);
  P.A = A.size() ? std::move(A) : Mat(0, n);
  P.b = std::move(b);
  P.Aeq = Aeq.size() ? std::move(Aeq) : Mat(0, n);
  P.beq = std::move(beq);
  return P;
}

double runif(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rnorm(std::mt19937_64& rng) {
  // explicit Box-Muller so streams are identical across platforms
  double u1 = std::max(runif(rng), 1e-300), u2 = runif(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Mat random_matrix(std::mt19937_64& rng, int r, int c) {
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = rnorm(rng);
  return M;
}

// Feasible-by-construction instance anchored at a random interior point.
qp::Problem random_instance(std::mt19937_64& rng, int n, int m, int p,
                            bool lp, bool singular_h = false) {
  Mat H = Mat::Zero(n, n);
  if (!lp) {
    Mat G = random_matrix(rng, n, singular_h ? std::max(1, n - 1) : n);
    H = G * G.transpose();
    if (!singular_h) H += 0.1 * Mat::Identity(n, n);
  }
  Vec f = random_matrix(rng, n, 1);
  Vec anchor = random_matrix(rng, n, 1);
  Mat A(m + 2 * n, n);
  Vec b(m + 2 * n);
  for (int r = 0; r < m; ++r) {
    A.row(r) = random_matrix(rng, 1, n);
    b[r] = A.row(r).dot(anchor) + 0.1 + runif(rng);
  }
  // box rows keep LPs bounded
  A.middleRows(m, n) = Mat::Identity(n, n);
  A.middleRows(m + n, n) = -Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    b[m + i] = anchor[i] + 1.0 + runif(rng);
    b[m + n + i] = -anchor[i] + 1.0 + runif(rng);
  }
  Mat Aeq(p, n);
  Vec beq(p);
  for (int r = 0; r < p; ++r) {
    Aeq.row(r) = random_matrix(rng, 1, n);
    beq[r] = Aeq.row(r).dot(anchor);
  }
  return make_qp(H, f, A, b, Aeq, beq);
}

}  // namespace

TEST_CASE("unconstrained quadratic minimum") {
  auto P = make_qp(Mat::Identity(2, 2), Vec::Zero(2), Mat(), Vec());
  auto sol = qp::solve(P);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.x.norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.active_set.empty());
}

TEST_CASE("single halfspace quadratic") {
  // minimize t1^2 + t2^2 s.t. t1 + t2 <= -1 (H = 2I form)
  Mat A(1, 2);
  A << 1, 1;
  Vec b(1);
  b << -1;
  auto P = make_qp(2.0 * Mat::Identity(2, 2), Vec::Zero(2), A, b);
  auto sol = qp::solve(P);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(sol.x[1] == doctest::Approx(-0.5).epsilon(1e-10));
  REQUIRE(sol.active_set == IndexList{0});
  CHECK(sol.ineq_duals[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.objective == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(sol.degenerate);
  CHECK(qp::check_kkt(P, sol).ok());
}

TEST_CASE("random 5-var QP matches active-set enumeration") {
  std::mt19937_64 rng(5);
  auto P = random_instance(rng, 5, 8, 0, /*lp=*/false);
  // keep only the 8 general rows plus a couple of box rows to stay <= 12
  qp::Problem trimmed = P;
  trimmed.A = P.A.topRows(10);
  trimmed.b = P.b.head(10);
  auto sol = qp::solve(trimmed);
  REQUIRE(sol.status == qp::Status::Optimal);
  auto oracle = oracles::qp_active_set_enumeration(trimmed);
  REQUIRE(oracle.has_value());
  CHECK(sol.objective == doctest::Approx(oracle->objective).epsilon(1e-9));
}

TEST_CASE("lp lower bound vertex") {
  // min x s.t. 0 <= x <= 1
  Mat A(2, 1);
  A << -1, 1;
  Vec b(2);
  b << 0, 1;
  Vec f(1);
  f << 1;
  auto P = qp::Problem::lp(f, A, b);
  auto sol = qp::solve_lp(P);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.active_set == IndexList{0});
}

TEST_CASE("lp symmetric facet picks deterministic vertex") {
  Mat A(3, 2);
  A << 1, 1, -1, 0, 0, -1;
  Vec b(3);
  b << 1, 0, 0;
  Vec f(2);
  f << -1, -1;
  auto P = qp::Problem::lp(f, A, b);
  auto s1 = qp::solve_lp(P);
  auto s2 = qp::solve_lp(P);
  REQUIRE(s1.status == qp::Status::Optimal);
  CHECK(s1.objective == doctest::Approx(-1.0).epsilon(1e-10));
  // vertex solution with the basis reported
  CHECK(s1.active_set.size() == 2);
  CHECK((s1.x - s2.x).norm() == doctest::Approx(0.0));
}

TEST_CASE("4-var LP matches vertex enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto P = random_instance(rng, 4, 4, 0, /*lp=*/true);
    auto sol = qp::solve_lp(P);
    REQUIRE(sol.status == qp::Status::Optimal);
    auto oracle = oracles::lp_vertex_enumeration(P);
    REQUIRE(oracle.has_value());
    CHECK(sol.objective == doctest::Approx(oracle->objective).epsilon(1e-9));
  }
}

TEST_CASE("row permutation leaves the objective unchanged") {
  std::mt19937_64 rng(23);
  auto P = random_instance(rng, 4, 6, 0, false);
  auto base = qp::solve(P);
  REQUIRE(base.status == qp::Status::Optimal);
  qp::Problem perm = P;
  const int m = P.num_ineq();
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = (i + 5) % m;
  for (int i = 0; i < m; ++i) {
    perm.A.row(i) = P.A.row(order[i]);
    perm.b[i] = P.b[order[i]];
  }
  auto sol = qp::solve(perm);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(base.objective).epsilon(1e-9));
}

TEST_CASE("infeasible problem yields a Farkas certificate") {
  Mat A(2, 1);
  A << 1, -1;
  Vec b(2);
  b << -1, -1;  // x <= -1 and x >= 1
  auto P = make_qp(Mat::Identity(1, 1), Vec::Zero(1), A, b);
  auto sol = qp::solve(P);
  REQUIRE(sol.status == qp::Status::Infeasible);
  const Vec& y = sol.farkas_ineq;
  REQUIRE(y.size() == 2);
  CHECK(y.minCoeff() >= -1e-10);
  CHECK((P.A.transpose() * y).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(y.dot(P.b) < -1e-8);
}

TEST_CASE("unbounded LP reports a ray") {
  Mat A(1, 1);
  A << -1;
  Vec b(1);
  b << 0;  // x >= 0
  Vec f(1);
  f << -1;
  auto P = qp::Problem::lp(f, A, b);
  auto sol = qp::solve_lp(P);
  REQUIRE(sol.status == qp::Status::Unbounded);
  REQUIRE(sol.ray.size() == 1);
  CHECK(sol.ray[0] > 0);
  CHECK(P.f.dot(sol.ray) < 0);
}

TEST_CASE("degenerate active sets are flagged") {
  Mat A(2, 2);
  A << 1, 0, 1, 0;  // duplicated row
  Vec b = Vec::Zero(2);
  auto P = make_qp(Mat::Identity(2, 2), Vec::Zero(2), A, b);
  auto sol = qp::solve(P);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.active_set == IndexList{0, 1});
  CHECK(sol.degenerate);
}

TEST_CASE("indefinite hessian is rejected") {
  Mat H(2, 2);
  H << 0, 1, 1, 0;
  auto P = make_qp(H, Vec::Zero(2), Mat(), Vec());
  CHECK_THROWS_AS(qp::solve(P), std::invalid_argument);
}

TEST_CASE("soft rows reproduce the explicit-slack reformulation") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 2 + static_cast<int>(rng() % 4);
    auto P = random_instance(rng, n, m, 0, trial % 2 == 0);
    // shift some rows so a few start violated at the optimum of the rest
    qp::Problem soft = P;
    soft.soft = Vec::Constant(P.num_ineq(), kInf);
    const double M = 50.0;
    for (int r = 0; r < m; ++r) {
      soft.b[r] -= 2.0 * runif(rng);
      soft.soft[r] = M;
    }
    // explicit slacks: vars [x; s], rows [A -I; 0 -I], cost M on s
    const int ms = m;
    const int ntot = n + ms;
    qp::Problem slack;
    slack.H = Mat::Zero(ntot, ntot);
    slack.H.topLeftCorner(n, n) = soft.H;
    slack.f = Vec::Zero(ntot);
    slack.f.head(n) = soft.f;
    slack.f.tail(ms) = Vec::Constant(ms, M);
    slack.A = Mat::Zero(soft.A.rows() + ms, ntot);
    slack.A.topLeftCorner(soft.A.rows(), n) = soft.A;
    slack.A.block(0, n, ms, ms) = -Mat::Identity(ms, ms);
    slack.A.block(soft.A.rows(), n, ms, ms) = -Mat::Identity(ms, ms);
    slack.b = Vec::Zero(soft.A.rows() + ms);
    slack.b.head(soft.b.size()) = soft.b;
    slack.Aeq = Mat(0, ntot);
    slack.beq = Vec(0);

    auto s_soft = qp::solve(soft);
    auto s_slack = qp::solve(slack);
    REQUIRE(s_soft.status == qp::Status::Optimal);
    REQUIRE(s_slack.status == qp::Status::Optimal);
    CHECK(s_soft.objective ==
          doctest::Approx(s_slack.objective).epsilon(1e-8));
    CHECK(qp::check_kkt(soft, s_soft).ok());
  }
}

TEST_CASE("soft equalities price violations at the penalty weight") {
  // min x^2 with soft x = 3 at weight 1: optimum balances 2x = 1
  qp::Problem P;
  P.H = 2.0 * Mat::Identity(1, 1);
  P.f = Vec::Zero(1);
  P.A = Mat(0, 1);
  P.b = Vec(0);
  P.Aeq = Mat::Identity(1, 1);
  P.beq = Vec::Constant(1, 3.0);
  P.eq_soft = Vec::Constant(1, 1.0);
  auto sol = qp::solve(P);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.eq_duals[0] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("kkt blocks hold for every optimal result") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % 6);
    const int p = static_cast<int>(rng() % std::max(1, n - 1));
    const bool lp = trial % 3 == 0;
    auto P = random_instance(rng, n, m, p, lp, trial % 5 == 0 && !lp);
    auto sol = lp ? qp::solve_lp(P) : qp::solve(P);
    REQUIRE(sol.status == qp::Status::Optimal);
    auto rep = qp::check_kkt(P, sol);
    CAPTURE(trial);
    CAPTURE(rep.stationarity);
    CAPTURE(rep.primal);
    CHECK(rep.ok());
    // complementary slackness spelled out: inactive rows carry zero duals
    for (int r : sol.inactive_set)
      CHECK(std::abs(sol.ineq_duals[r]) <= 1e-8);
  }
}
