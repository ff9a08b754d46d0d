#include <doctest.h>

#include "checks.hpp"
#include "ddelab/threshold.hpp"

#include <cmath>

using namespace ddelab;

TEST_SUITE("threshold") {

TEST_CASE("z^c never reaches 1") {
  for (double c : {0.5, 1.0, 3.0}) {
    const ZClassification z = classify_zd(c, c);
    CHECK(z.verdict != ZVerdict::HitsOne);
    const Trajectory tr = z_trajectory(c, c, 2.0, 199.0);
    CHECK(tr.max_on(0.0, 199.0) < 1.0);
    CHECK(tr.min_on(0.0, 199.0) > 0.0);
  }
}

TEST_CASE("verdicts far from the threshold") {
  const ZClassification near = classify_zd(1.0, 1.0 + 1.0 / 100.0);
  CHECK(near.verdict == ZVerdict::InD);
  const ZClassification big = classify_zd(1.0, 100.0);
  REQUIRE(big.verdict == ZVerdict::HitsOne);
  CHECK(big.evidence > 1.0);
  CHECK(big.evidence <= 2.0);
  const Trajectory tr = z_trajectory(1.0, 100.0, 2.0, 3.0);
  CHECK(std::abs(tr.value(big.evidence - 1.0) - 1.0) < 1e-10);
  CHECK(tr.max_on(0.0, big.evidence - 1.0 - 1e-9) < 1.0);
  CHECK_THROWS_AS(classify_zd(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("x1 and x2 parameters lie above the threshold") {
  CHECK(classify_zd(1.0, 7.38).verdict == ZVerdict::HitsOne);
  CHECK(classify_zd(4.0, 12.71).verdict == ZVerdict::HitsOne);
}

TEST_CASE("bisection brackets") {
  const DStarResult r = find_dstar_auto(1.0, 1e-6);
  CHECK(r.hi - r.lo < 1e-6 * r.lo);
  CHECK(r.dstar > 1.0);
  CHECK(r.dstar == doctest::Approx(1.75646656).epsilon(1e-6));
  CHECK(classify_zd(1.0, r.dstar * (1.0 - 1e-5)).verdict == ZVerdict::InD);
  CHECK(classify_zd(1.0, r.dstar * (1.0 + 1e-5)).verdict == ZVerdict::HitsOne);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const double w0 = r.history[i - 1].hi - r.history[i - 1].lo;
    const double w1 = r.history[i].hi - r.history[i].lo;
    CHECK(w1 == doctest::Approx(0.5 * w0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(find_dstar(1.0, 1.2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(find_dstar(1.0, 1.2, 3.0, 1e-8), std::invalid_argument);
}

TEST_CASE("threshold exceeds c") {
  for (double c : {0.5, 3.0}) CHECK(find_dstar_auto(c, 1e-4).dstar > c);
}

TEST_CASE("D is down-closed on a grid") {
  bool seen_in = false;
  for (double d : {1.74, 1.6, 1.4, 1.2, 1.05}) {
    const bool in = classify_zd(1.0, d).verdict == ZVerdict::InD;
    if (seen_in) CHECK(in);
    seen_in = seen_in || in;
  }
  CHECK(seen_in);
}

TEST_CASE("z ordering") {
  const checks::Outcome o = checks::z_ordering(1.0, {1.2, 1.5, 1.75, 2.0, 3.0});
  INFO(o.detail);
  CHECK(o.pass);
}

TEST_CASE("envelopes") {
  CHECK(tau1_closed_form(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double dstar = 1.75646656;
  const EnvelopeData env = envelopes(1.0, 7.38, 0.5 * (dstar + 7.38));
  CHECK(std::abs(env.w1_at(env.tau1) - 1.0) < 1e-10);
  for (int i = 1; i < 100; ++i) CHECK(env.w1_at(env.tau1 * i / 100.0) > 1.0);
  CHECK(env.m0 < 1.0);
  CHECK(env.m1 > 1.0);
  CHECK(env.m1 == doctest::Approx(7.38));
  CHECK(env.m0 <= env.xi1);
  CHECK(env.sigma == doctest::Approx(std::max(env.tau0, env.tau1)));
  CHECK(env.m0_tilde == doctest::Approx(0.5 * env.m0));
  CHECK(env.m1_tilde == doctest::Approx(2.0 * 7.38));
  CHECK(env.ledger.delta > 0.0);
  CHECK(env.nu1 == doctest::Approx(1.0 + 2.0 / env.ledger.delta * (2.0 * 7.38 - 1.0)).epsilon(1e-12));
  CHECK(std::abs(env.w0_at(env.tau0) - 1.0) < 1e-10);
  CHECK_THROWS_AS(envelopes(1.0, 7.38, 1.2), std::invalid_argument);
}

TEST_CASE("delta ledger") {
  const double dstar = 1.75646656;
  const EnvelopeData env = envelopes(1.0, 7.38, 0.5 * (dstar + 7.38));
  const LedgerReport r = check_n_ledger(env, 400);
  REQUIRE(r.items.size() == 9);
  const LedgerItem& item8 = r.items[7];
  CHECK(item8.index == 8);
  CHECK(item8.pass == (1.0 + env.ledger.delta < r.b_n / r.a_n && r.b_n / r.a_n < 2.0 * 7.38 / 1.0));
  CHECK(item8.pass);
  const LedgerReport gr = check_n_ledger(env, Feedback::power_cutoff(2.0), 1.0, 7.38);
  CHECK(gr.items[5].pass);
  CHECK(gr.items[6].pass);
  // Items (6) and (7) at this delta need n far beyond 400.
  CHECK(smallest_ledger_n(env, {50, 100, 200, 400}) == -1);
  const int n = smallest_ledger_n(env, {400, 1600, 6400, 25600, 102400, 409600});
  CHECK(n > 400);
  CHECK(check_n_ledger(env, n).pass_5_to_9());
}

TEST_CASE("gap filling and interval exit") {
  const checks::Outcome o = checks::interval_exit(1.0, 7.38, 200);
  INFO(o.detail);
  CHECK(o.pass);
}

}
