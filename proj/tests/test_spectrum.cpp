#include <doctest.h>

#include "ddelab/spectrum.hpp"

#include <cmath>
#include <numbers>

using namespace ddelab;
using std::numbers::pi;

TEST_SUITE("spectrum") {

TEST_CASE("stationary points of the limit prototype") {
  const SystemSpec lim = SystemSpec::limit(1.0, 7.38);
  CHECK(limit_unstable_point(lim) == doctest::Approx(1.0 / 7.38).epsilon(1e-15));
  const StationarySet s = stationary_points(lim, 0.9);
  REQUIRE(s.interior().size() == 1);
  CHECK(s.interior()[0] == doctest::Approx(1.0 / 7.38).epsilon(1e-11));
  CHECK(s.points.front().value == 0.0);
}

TEST_CASE("stationary points of the smooth prototype") {
  const SystemSpec sm = SystemSpec::smooth(1.0, 7.38, 2.0, 100);
  const StationarySet s = stationary_points(sm, 0.9);
  REQUIRE(s.interior().size() == 1);
  CHECK(std::abs(s.interior()[0] - 0.135501) < 1e-6);
  CHECK(s.points[1].stability == Stability::Unstable);
  CHECK(s.points[1].residual < 1e-11);
  const StationarySet wide = stationary_points(sm, 2.0);
  REQUIRE(wide.interior().size() == 2);
  CHECK(std::abs(wide.interior()[1] - 1.0) < 0.05);
}

TEST_CASE("leading real root") {
  CHECK(leading_real_root(1.0, 1.0).value == 0.0);
  CHECK(leading_real_root(1.0, 2.0).value == doctest::Approx(0.3748225281836234).epsilon(1e-11));
  CHECK(leading_real_root(1.0, 2.0 * std::numbers::e).value == doctest::Approx(1.0).epsilon(1e-11));
  const RealRoot neg = leading_real_root(2.0, 1.0);
  CHECK_FALSE(neg.positive);
  CHECK(neg.value < 0.0);
  CHECK(std::abs(neg.value + 2.0 - std::exp(-neg.value)) < 1e-10);
}

TEST_CASE("complex roots") {
  const auto roots = complex_roots(1.0, 2.0, 5);
  REQUIRE(roots.size() == 5);
  const double lambda0 = leading_real_root(1.0, 2.0).value;
  for (const ComplexRoot& r : roots) {
    CHECK_FALSE(r.hole);
    CHECK(r.residual < 1e-10);
    CHECK(characteristic_residual(1.0, 2.0, std::conj(r.value)) < 1e-10);
    CHECK(r.value.imag() > (2 * r.j - 1) * pi);
    CHECK(r.value.imag() < 2 * r.j * pi);
  }
  CHECK(lambda0 > roots[0].value.real());
  CHECK(roots[0].value.real() > roots[1].value.real());
  const SpectrumReport rep = spectrum(1.0, 2.0);
  CHECK(rep.ordered);
  CHECK(rep.gap_high == doctest::Approx(std::exp(lambda0)));
}

TEST_CASE("Hopf angle") {
  const double c = 5.0 * pi / (3.0 * std::sqrt(3.0));
  CHECK(std::abs(solve_theta(c, 1) - 5.0 * pi / 3.0) < 1e-10);
  CHECK(prototype_hopf_c(1) == doctest::Approx(c).epsilon(1e-15));
  for (double cc : {0.01, 0.5, 1.0, 3.0, 100.0}) {
    const double th = solve_theta(cc, 1);
    CHECK(th > 1.5 * pi);
    CHECK(th < 2.0 * pi);
  }
  for (double cc : {0.5, 1.0, 3.0})
    for (int j : {1, 2, 3}) CHECK(std::abs(solve_theta(cc, j) + cc * std::tan(solve_theta(cc, j))) < 1e-10);
}

TEST_CASE("Hopf angle is monotone in c") {
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double th = solve_theta(0.1 * i, 2);
    CHECK(th > prev);
    prev = th;
  }
  CHECK(solve_theta(1e-6, 1) - 1.5 * pi < 1e-5);
  CHECK(2.0 * pi - solve_theta(1e6, 1) < 1e-5);
}

TEST_CASE("transversality") {
  CHECK(transversality(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  const double c = prototype_hopf_c(1);
  const double th = solve_theta(c, 1);
  CHECK(std::abs(transversality(c, th) - transversality_fd(c, 2.0 * c, th)) < 1e-6);
  for (int j : {1, 2, 3}) {
    const double cj = prototype_hopf_c(j);
    const double tj = solve_theta(cj, j);
    CHECK(std::abs(transversality(cj, tj) - transversality_fd(cj, 2.0 * cj, tj)) < 1e-6);
    CHECK(transversality(cj, tj) > 0.0);
  }
}

TEST_CASE("Hopf data") {
  const double c = prototype_hopf_c(1);
  const HopfData h = hopf_data(c, 25.0, 2.0, 200);
  CHECK(h.cg_residual < 1e-8);
  CHECK(h.theta == doctest::Approx(5.0 * pi / 3.0).epsilon(1e-12));
  CHECK(h.theta_n > 1.5 * pi);
  CHECK(h.theta_n < 2.0 * pi);
  CHECK(h.beta_n == doctest::Approx(-h.theta_n / (c * std::tan(h.theta_n))).epsilon(1e-12));
  CHECK(h.a_n == doctest::Approx(h.beta_n * c).epsilon(1e-14));
  CHECK(h.b_n == doctest::Approx(h.beta_n * 25.0).epsilon(1e-14));
  CHECK(h.transversality > 0.0);
  const HopfData t = hopf_data(c, 25.0, 2.0, 200, 1, 0.1);
  CHECK(t.a_n == doctest::Approx(1.1 * h.a_n).epsilon(1e-14));
  // At the prototype's stationary point d f_n'(xi_1n) = 2c up to n xi^n, so the angles coincide.
  for (int n : {50, 200, 1600}) {
    const HopfData hn = hopf_data(c, 25.0, 2.0, n);
    CHECK(std::abs(hn.beta_n - 1.0) < 1e-12);
    CHECK(std::abs(hn.theta_n - hn.theta) < 1e-12);
  }
  CHECK_THROWS_AS(hopf_data(1.0, 25.0, 2.0, 200), std::invalid_argument);
}

TEST_CASE("prototype linearisation coefficient is 2c") {
  for (double d : {1.5, 3.0, 7.38, 12.71, 25.0, 100.0}) {
    const SystemSpec s = SystemSpec::limit(1.3, d);
    const double xi = limit_unstable_point(s);
    CHECK(std::abs(d * s.feedback.derivative(xi) - 2.6) < 1e-12);
  }
}

TEST_CASE("leading root increases with mu") {
  double prev = -1.0;
  for (int i = 0; i <= 40; ++i) {
    const double v = leading_real_root(1.0, 1.0 + 0.25 * i).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("report at the unstable point") {
  const SpectrumReport r = spectrum_at_unstable_point(SystemSpec::limit(1.0, 7.38));
  CHECK(r.mu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.lambda0 == doctest::Approx(0.3748225281836234).epsilon(1e-10));
  CHECK(r.max_residual < 1e-10);
  const nlohmann::json j = r.to_json();
  CHECK(j.contains("lambda0"));
}

}
