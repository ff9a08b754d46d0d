#include <doctest.h>

#include "checks.hpp"
#include "ddelab/manifold.hpp"
#include "ddelab/spectrum.hpp"

#include <cmath>

using namespace ddelab;

namespace {

void landmark_identity(double c, double d) {
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(c, d), Branch::Plus);
  REQUIRE(x.landmarks.found);
  const Landmarks& L = x.landmarks;
  CHECK(std::abs(L.t2 - L.t1 - 1.0 - std::log(x.value(L.t1 + 1.0)) / c) < 1e-6);
  CHECK(exp_segment_check(x) < 1e-8);
  CHECK(std::abs(x.value(0.0) - (x.xi_star + x.kappa)) < 1e-8);
  CHECK(x.min_increment(x.t_min() + 1.0, L.t1 + 1.0) > -1e-10);
}

}  // namespace

TEST_SUITE("manifold") {

TEST_CASE("limit plus branch landmarks (1, 7.38)") { landmark_identity(1.0, 7.38); }
TEST_CASE("limit plus branch landmarks (4, 12.71)") { landmark_identity(4.0, 12.71); }

TEST_CASE("exponential segment check is shift invariant") {
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(1.0, 7.38), Branch::Plus);
  ManifoldSolution y = x;
  y.shift += 0.375;
  y.landmarks.t1 -= 0.375;
  y.landmarks.t2 -= 0.375;
  CHECK(exp_segment_check(y) == doctest::Approx(exp_segment_check(x)).epsilon(1e-6));
}

TEST_CASE("limit minus branch decreases to 0") {
  ManifoldOptions opt;
  opt.horizon = 40.0;
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(1.0, 7.38), Branch::Minus, opt);
  CHECK(std::abs(x.value(0.0) - (x.xi_star + x.kappa)) < 1e-8);
  double prev = x.value(x.t_min() + 1.0);
  bool decreasing = true;
  for (int i = 1; i <= 4000; ++i) {
    const double t = x.t_min() + 1.0 + (x.t_max() - x.t_min() - 1.0) * i / 4000.0;
    const double v = x.value(t);
    decreasing = decreasing && v <= prev + 1e-12;
    prev = v;
  }
  CHECK(decreasing);
  CHECK(x.value(x.t_max()) < 1e-6);
}

TEST_CASE("smooth plus branch increases up to the normalising crossing") {
  const ManifoldSolution y = shoot_branch(SystemSpec::smooth(1.0, 7.38, 2.0, 200), Branch::Plus);
  CHECK(y.min_increment(y.t_min() + 1.0, 0.0) > -1e-10);
  CHECK(std::abs(y.value(0.0) - (y.xi_star + y.kappa)) < 1e-8);
}

TEST_CASE("seed robustness") {
  const checks::Outcome o = checks::seed_robustness(1.0, 7.38);
  INFO(o.detail);
  CHECK(o.pass);
}

TEST_CASE("convergence table trend") {
  const ConvergenceTable tab = convergence_table(1.0, 7.38, 2.0, {20, 160}, 0);
  REQUIRE(tab.rows.size() == 2);
  REQUIRE(tab.rows[0].available);
  REQUIRE(tab.rows[1].available);
  CHECK(tab.m == static_cast<int>(std::ceil(tab.limit_landmarks.t2)) + 1);
  CHECK(tab.rows[1].sup_distance < tab.rows[0].sup_distance);
  CHECK(tab.super_threshold_ok);
  const double xi1 = 1.0 / 7.38;
  for (const ConvergenceRow& r : tab.rows) {
    CHECK(r.value_gap0 <= std::abs(r.xi1n - xi1) + 1e-9);
    CHECK(r.window_min > 1.0);
  }
}

TEST_CASE("argument errors") {
  const SystemSpec lim = SystemSpec::limit(1.0, 7.38);
  ManifoldOptions bad;
  bad.kappa = 0.95;
  CHECK_THROWS_AS(shoot_branch(lim, Branch::Plus, bad), std::invalid_argument);
  ManifoldOptions bad_seed;
  bad_seed.eps_seed = 1e-3;
  CHECK_THROWS_AS(shoot_branch(lim, Branch::Plus, bad_seed), std::invalid_argument);
  ManifoldOptions wrong_sign;
  wrong_sign.kappa = 0.2;
  CHECK_THROWS_AS(shoot_branch(lim, Branch::Minus, wrong_sign), std::invalid_argument);
}

TEST_CASE("csv export") {
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(1.0, 7.38), Branch::Plus);
  const std::string csv = x.to_csv(0.05);
  CHECK(csv.rfind("t,x,x_delayed\n", 0) == 0);
  CHECK(csv == shoot_branch(SystemSpec::limit(1.0, 7.38), Branch::Plus).to_csv(0.05));
}

}
