#include <doctest.h>

#include "checks.hpp"

using namespace ddelab;

TEST_SUITE("properties") {

TEST_CASE("monotone ordering") {
  const checks::Outcome o = checks::monotone_ordering();
  INFO(o.detail);
  CHECK(o.cases == 20);
  CHECK(o.failures == 0);
}

TEST_CASE("band membership") {
  const checks::Outcome o = checks::band_membership(1.0, 7.38, 200);
  INFO(o.detail);
  CHECK(o.pass);
}

TEST_CASE("step halving") {
  const checks::Outcome o = checks::step_halving();
  INFO(o.detail);
  CHECK(o.cases == 3);
  CHECK(o.pass);
}

}
