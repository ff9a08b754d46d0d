#pragma once

#include "ddelab/integrator.hpp"
#include "ddelab/spectrum.hpp"
#include "ddelab/system.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace ddelab {

// One period of an orbit, reintegrated from the anchor segment q0: traj covers [-1, period].
struct PeriodicOrbit {
  SystemSpec system;
  HistoryFunction q0;
  Trajectory traj;
  double level = 1.0;         // section y = level, increasing
  double anchor = 0.0;        // anchor time in the source trajectory
  double period = 0.0;
  int crossings_per_period = 1;
  double min_value = 0.0;
  double max_value = 0.0;
  double return_residual = 0.0;
  double gap_spread = 0.0;    // relative spread of candidate periods

  double amplitude() const { return 0.5 * (max_value - min_value); }
  // p(theta) for any real theta, p(0) = level.
  double value(double theta) const;
  // Values at `count` equally spaced phases over one period.
  std::vector<double> samples(int count) const;
  nlohmann::json to_json() const;
};

struct PeriodicOptions {
  double gap_tol = 1e-4;
  double residual_tol = 1e-6;
  int max_crossings_per_period = 64;
  int min_periods = 3;
};

// Return residual sup_{s in [-1,0]} |y(t + omega + s) - y(t + s)| on a fine grid.
double return_residual(const Trajectory& traj, double t, double omega, int samples = 2000);

std::optional<PeriodicOrbit> detect_periodic(const Trajectory& traj, double level, double transient,
                                             const PeriodicOptions& opt = {});

// min over phases theta of sup_{s on mesh} |phi(s) - p(theta + s)|.
double orbit_distance(const PeriodicOrbit& orbit, const HistoryFunction& segment, int mesh = 100);
double orbit_distance(const PeriodicOrbit& orbit, const Trajectory& traj, double t, int mesh = 100);

// Column i: derivative of the period map in the direction of the i-th hat function on a uniform
// mesh of [-1, 0], by central differences of the flow, sampled on the same mesh.
std::vector<std::vector<double>> monodromy_matrix(const SystemSpec& system, const HistoryFunction& q0,
                                                  double omega, int cells, const IntegratorOptions& opt = {},
                                                  double eps = 1e-6);

struct FloquetReport {
  int mesh = 0;
  std::vector<std::complex<double>> multipliers;  // by decreasing magnitude
  double trivial_error = 0.0;
  bool defective = false;
  double leading_nontrivial = 0.0;  // magnitude
  bool has_unstable = false;
  double lambda_u = 0.0;            // largest real multiplier > 1 other than the trivial one
  std::vector<double> psi_u;        // its eigenvector on the mesh, max entry 1
  bool psi_u_positive = false;
  bool stable() const { return !multipliers.empty() && leading_nontrivial < 1.0; }
  nlohmann::json to_json() const;
};

FloquetReport monodromy_multipliers(const PeriodicOrbit& orbit, int cells = 200, const IntegratorOptions& opt = {},
                                    int keep = 12);

struct AttractionOptions {
  std::uint64_t seed = 20240611;
  double horizon = 0.0;  // 0: 100 + 10 periods
  double tol = 1e-3;
  int knots = 8;
  IntegratorOptions integrator;
};

struct AttractionReport {
  double eps = 0.0;
  int trials = 0;
  int passed = 0;
  double horizon = 0.0;
  std::vector<double> distances;
  std::vector<int> failures;
  nlohmann::json to_json() const;
};

// Random piecewise-linear starts with values in [1 + eps, band_upper].
AttractionReport verify_attraction(const PeriodicOrbit& orbit, double eps, int trials,
                                   const AttractionOptions& opt = {});

// Newton shooting for a periodic orbit with phase condition q0(0) = level.
struct ShootingResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // node residual
  double period = 0.0;
  HistoryFunction q0;
};

ShootingResult refine_orbit(const SystemSpec& system, const HistoryFunction& guess, double period, double level,
                            int cells = 200, const IntegratorOptions& opt = {}, int max_iter = 10);

struct HopfSearchOptions {
  std::vector<double> alpha_grid{0.2, 0.1, 0.05, 0.02, -0.02, -0.05, -0.1, -0.2};
  int j = 1;
  double amplitude_max = 0.2;
  int restarts = 4;
  int newton_cells = 200;
  double return_tol = 1e-5;  // fine-grid return residual of the shooting node interpolant
  IntegratorOptions integrator;
};

struct HopfCandidate {
  double alpha = 0.0;
  bool found = false;
  std::string note;
  HopfData data;
  double expected_period = 0.0;  // 2 pi / theta_n
  double period = 0.0;
  double amplitude = 0.0;        // max |q - xi_1n|
  double residual = 0.0;
  std::optional<PeriodicOrbit> orbit;
  nlohmann::json to_json() const;
};

struct HopfSearchResult {
  double c = 0.0;
  double d = 0.0;
  int n = 0;
  std::vector<HopfCandidate> table;
  int selected = -1;
  const HopfCandidate* orbit() const { return selected < 0 ? nullptr : &table[selected]; }
  nlohmann::json to_json() const;
};

HopfSearchResult hopf_orbit_search(double c, double d, double k, int n, const HopfSearchOptions& opt = {});

}  // namespace ddelab
