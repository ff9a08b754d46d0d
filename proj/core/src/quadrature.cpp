#include "ddelab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ddelab {

namespace gk {
const double nodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

const double kronrod_weights[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

const double gauss_weights[15] = {
    0.0, 0.129484966168869693270611432679082, 0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975, 0.0, 0.417959183673469387755102040816327,
    0.0, 0.381830050505118944950369775488975, 0.0, 0.279705391489276667901467771423780,
    0.0, 0.129484966168869693270611432679082, 0.0};
}  // namespace gk

QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k = 0.0;
  double g = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(c + h * gk::nodes[i]);
    k += gk::kronrod_weights[i] * v;
    g += gk::gauss_weights[i] * v;
  }
  return {k * h, std::abs((k - g) * h), 15};
}

namespace {

void adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
           QuadratureResult& acc) {
  QuadratureResult r = gauss_kronrod15(f, a, b);
  acc.evaluations += r.evaluations;
  if (r.error <= tol || depth <= 0 || b - a < 1e-14 * std::max(1.0, std::abs(a))) {
    acc.value += r.value;
    acc.error += r.error;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth - 1, acc);
  adapt(f, m, b, 0.5 * tol, depth - 1, acc);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, double rel_tol, int max_depth) {
  QuadratureResult acc;
  if (b == a) return acc;
  double tol = abs_tol;
  if (rel_tol > 0.0) {
    QuadratureResult coarse = gauss_kronrod15(f, a, b);
    tol = std::max(abs_tol, rel_tol * std::abs(coarse.value));
  }
  adapt(f, a, b, tol, max_depth, acc);
  return acc;
}

}  // namespace ddelab
