#pragma once

#include "ddelab/integrator.hpp"
#include "ddelab/system.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace ddelab {

enum class Branch { Plus, Minus };

std::string to_string(Branch b);

struct ManifoldOptions {
  std::optional<double> kappa;     // default (1 - xi)/2 for plus, -xi/2 for minus
  std::optional<double> eps_seed;  // default |kappa| e^{-15}, capped at 1e-4
  double horizon = 30.0;           // forward extent after the normalised crossing
  IntegratorOptions integrator;
};

struct Landmarks {
  bool found = false;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double eps = 0.0;
  double x_t1p1 = 0.0;
  bool eps_shrunk = false;  // eps had to be reduced to fit a unit window
  nlohmann::json to_json() const;
};

// Leading unstable solution, stored in integration time and read in shifted time
// (value at 0 equals xi + kappa).
class ManifoldSolution {
 public:
  Branch branch = Branch::Plus;
  SystemSpec system;
  double xi_star = 0.0;
  double lambda0 = 0.0;
  double kappa = 0.0;
  double eps_seed = 0.0;
  double shift = 0.0;
  double t_back = 0.0;  // min(15/lambda0, shift)
  Trajectory traj;
  Landmarks landmarks;

  double value(double t) const { return traj.value(t + shift); }
  double operator()(double t) const { return value(t); }
  double t_min() const { return -shift - 1.0; }
  double t_max() const { return traj.t_end() - shift; }
  double max_on(double a, double b) const { return traj.max_on(a + shift, b + shift); }
  double min_on(double a, double b) const { return traj.min_on(a + shift, b + shift); }
  std::vector<Crossing> crossings(double level, double a, double b) const;
  // Smallest forward difference of samples on [a, b].
  double min_increment(double a, double b, int samples = 20000) const;
  HistoryFunction segment(double t) const { return segment_at(traj, t + shift); }
  std::string to_csv(double dt = 0.01) const;
};

ManifoldSolution shoot_branch(const SystemSpec& system, Branch branch, const ManifoldOptions& opt = {});

Landmarks compute_landmarks(const ManifoldSolution& sol);

// sup over [t1+1, t2+1] of |x(t) - x(t1+1) e^{-c(t - t1 - 1)}|.
double exp_segment_check(const ManifoldSolution& sol, int samples = 4000);

// sup_{[a,b]} |u - v| on a uniform grid of spacing dt.
double sup_distance(const ManifoldSolution& u, const ManifoldSolution& v, double a, double b, double dt = 1e-4);

struct ConvergenceRow {
  int n = 0;
  bool available = false;
  double xi1n = 0.0;
  double sup_distance = 0.0;       // over [0, m]
  double segment_distance0 = 0.0;  // sup over [-1, 0]
  double value_gap0 = 0.0;         // |y(0) - x(0)|
  double window_min = 0.0;         // min y on [t3, t3+1]
};

struct ConvergenceTable {
  double c = 0.0;
  double d = 0.0;
  double k = 2.0;
  int m = 0;
  Landmarks limit_landmarks;
  std::vector<ConvergenceRow> rows;
  int knee = -1;  // first index from which available rows are non-increasing
  bool super_threshold_ok = false;  // largest n stays >= 1 + eps on [t3, t3+1]
  nlohmann::json to_json() const;
};

ConvergenceTable convergence_table(double c, double d, double k, const std::vector<int>& n_grid, int m,
                                   const ManifoldOptions& opt = {});

}  // namespace ddelab
