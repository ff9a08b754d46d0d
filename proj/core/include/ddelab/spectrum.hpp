#pragma once

#include "ddelab/system.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <vector>

namespace ddelab {

enum class Stability { Unstable, StableCandidate };

struct StationaryPoint {
  double value;
  Stability stability;
  double residual;
};

struct StationarySet {
  double ceiling = 0.0;
  std::vector<StationaryPoint> points;  // ascending, 0 first
  // Interior zeros in (0, ceiling).
  std::vector<double> interior() const;
};

StationarySet stationary_points(const SystemSpec& system, double ceiling, int grid = 10000);

// Closed form c/d for k = 2, (c/d)^(1/(k-1)) in general.
double limit_unstable_point(const SystemSpec& limit_system);

// First interior zero of -a x + b f(x) (the unstable point below 1).
double unstable_point(const SystemSpec& system);

struct RealRoot {
  double value = 0.0;
  bool positive = true;  // false when mu < a and the returned root is negative
};

// Real root of lambda + a - mu exp(-lambda) = 0.
RealRoot leading_real_root(double a, double mu);

struct ComplexRoot {
  int j = 0;
  std::complex<double> value;
  double residual = 0.0;
  bool newton = true;  // false when the phase-condition fallback was used
  bool hole = false;   // neither method produced a root in the strip
};

// Roots with Im in ((2j-1)pi, 2j pi), j = 1..count.
std::vector<ComplexRoot> complex_roots(double a, double mu, int count = 5);

double characteristic_residual(double a, double mu, std::complex<double> lambda);

struct SpectrumReport {
  double a = 0.0;
  double mu = 0.0;
  double lambda0 = 0.0;
  std::vector<ComplexRoot> pairs;
  double gap_low = 0.0;   // exp(Re lambda_1)
  double gap_high = 0.0;  // exp(lambda_0)
  double max_residual = 0.0;
  bool ordered = true;
  nlohmann::json to_json() const;
};

SpectrumReport spectrum(double a, double mu, int count = 5);
// Linearisation at the unstable interior point of a system.
SpectrumReport spectrum_at_unstable_point(const SystemSpec& system, int count = 5);

// Root of theta + c tan(theta) = 0 in (2j pi - pi/2, 2j pi).
double solve_theta(double c, int j);

// mu'(0) = theta^2 / ((1 + a)^2 + theta^2).
double transversality(double a, double theta);

// Root of H(alpha, lambda) = lambda + (1 + alpha)(a - B exp(-lambda)) continued from i theta.
std::complex<double> track_hopf_root(double a, double big_b, double theta, double alpha);
// Central difference of Re lambda(alpha) at alpha = 0.
double transversality_fd(double a, double big_b, double theta, double step = 1e-5);

struct HopfData {
  int j = 1;
  double c = 0.0;
  double d = 0.0;
  int n = 0;
  double k = 2.0;
  double alpha = 0.0;
  double theta = 0.0;        // limit angle
  double theta_n = 0.0;      // angle from cos = c / (d f_n'(xi_1n))
  double beta_n = 0.0;
  double xi1 = 0.0;
  double xi1n = 0.0;
  double a_n = 0.0;
  double b_n = 0.0;
  double cg_residual = 0.0;            // |c - d g'(xi_1) cos theta|
  double theta_residual = 0.0;         // |theta + c tan theta|
  double transversality = 0.0;         // with (a, theta) = (beta_n c, theta_n)
  double transversality_limit = 0.0;   // with (a, theta) = (c, theta)
  nlohmann::json to_json() const;
};

class HopfUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HopfData hopf_data(double c, double d, double k, int n, int j = 1, double alpha = 0.0);

// The d solving the cutoff Hopf condition for the k = 2 prototype is free; c must be
// (2 j pi - pi/3)/sqrt(3).
double prototype_hopf_c(int j);

}  // namespace ddelab
