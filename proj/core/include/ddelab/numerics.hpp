#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace ddelab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Single Gauss-Kronrod 7/15 panel on [a, b].
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection driven by the G7/K15 difference.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol = 0.0, int max_depth = 30);

namespace gk {
// Nodes on [-1, 1]; index 7 is the centre. Odd-indexed nodes belong to G7.
extern const double nodes[15];
extern const double kronrod_weights[15];
extern const double gauss_weights[15];
}  // namespace gk

class RootNotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bisection to an absolute x tolerance. Requires f(lo) and f(hi) of opposite sign
// (a zero value at either end is accepted as the root).
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-15, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw RootNotBracketed("bisect: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= x_tol) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double sq(double x) { return x * x; }

// Golden-section minimisation on [lo, hi] for unimodal f.
template <class F>
double golden_min(F&& f, double lo, double hi, double x_tol = 1e-12, int max_iter = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ddelab
