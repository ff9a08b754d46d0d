#pragma once

#include <string>
#include <vector>

// Property checks shared by the unit suite and the acceptance binary.
namespace ddelab::checks {

struct Outcome {
  std::string name;
  bool pass = true;
  int cases = 0;
  int failures = 0;
  std::string detail;
};

// x^phi <= x^psi + 1e-9 at mesh times while both stay in [0, 1) (limit system, 1, 7.38).
Outcome monotone_ordering(int pairs = 20, unsigned seed = 7);
// z^{d1} < z^{d2} + 1e-9 on (1, omega) for consecutive points of a d-grid.
Outcome z_ordering(double c, const std::vector<double>& d_grid);
// Time-shifted x^+ with eps_seed and eps_seed/2 agree to 1e-6 on [0, 10].
Outcome seed_robustness(double c, double d);
// x^+ in [m0, m1] and y^{+,n} in [m0~, m1~] for t >= 0.
Outcome band_membership(double c, double d, int n);
// Excursions of y^{+,n} after t2 below 1 - delta end within tau0 and stay above m0/2;
// above 1 + delta end within nu1 and stay below 2d/c. Also the gap-filling bound for x^+.
Outcome interval_exit(double c, double d, int n);
// Endpoint differences under step halving shrink by about 16 (no dense refinement).
Outcome step_halving();

std::vector<Outcome> property_suite();

}  // namespace ddelab::checks
