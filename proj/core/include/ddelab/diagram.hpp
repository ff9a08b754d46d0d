#pragma once

#include "ddelab/diagnose.hpp"
#include "ddelab/manifold.hpp"
#include "ddelab/periodic.hpp"
#include "ddelab/threshold.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ddelab {

enum class Regime { Below, Critical, Above };
enum class Limit { Zero, Attractor, Periodic, Stationary, Unresolved };

std::string to_string(Regime r);
std::string to_string(Limit l);

struct BandCheck {
  double m0_tilde = 0.0;
  double m1_tilde = 0.0;
  double sigma_tilde = 0.0;
  double delta = 0.0;
  double min_value = 0.0;       // over [0, T]
  double max_value = 0.0;
  bool in_band = false;         // within 1e-6 of [m0~, m1~]
  double recurrence_gap = 0.0;  // longest stretch after t2 without a visit to [1 - delta, 1 + delta]
  bool recurrence_ok = false;   // gap <= sigma~
  nlohmann::json to_json() const;
};

struct BranchVerdict {
  Branch branch = Branch::Plus;
  Limit limit = Limit::Unresolved;
  OrbitClassification evidence;
  Landmarks landmarks;
  std::optional<BandCheck> band;
  std::optional<FloquetReport> floquet;
  std::string note;
  nlohmann::json to_json() const;
};

struct HopfFate {
  int side = 1;  // +1: q0 + s psi_u, -1: q0 - s psi_u
  double s = 0.0;
  Limit limit = Limit::Unresolved;
  double value = 0.0;           // limit value for Zero / Stationary
  double orbit_distance = -1.0; // distance to the stable orbit of the Hopf system, when one is known
  OrbitClassification evidence;
  nlohmann::json to_json() const;
};

struct HopfSection {
  HopfSearchResult search;
  std::optional<FloquetReport> floquet;
  std::optional<PeriodicOrbit> stable_orbit;  // O^n of the Hopf system, from its plus branch
  std::vector<HopfFate> fates;
  std::string note;
  bool present() const { return search.orbit() != nullptr; }
  nlohmann::json to_json() const;
};

struct DiagramOptions {
  std::optional<double> dstar;  // skip the bisection when given
  double dstar_tol = 1e-6;
  double horizon = 300.0;
  int floquet_cells = 200;      // 0 skips the Floquet check
  bool band_checks = true;
  bool hopf = false;
  HopfSearchOptions hopf_search;
  std::vector<double> hopf_seeds{1e-3};  // s values, used on both sides
  int hopf_floquet_cells = 100;
  double hopf_horizon = 300.0;
  ManifoldOptions manifold;
  DiagnoseOptions diagnose;
  ThresholdOptions threshold;
};

struct ConnectionDiagram {
  double c = 0.0;
  double d = 0.0;
  double k = 2.0;
  int n = 0;
  double dstar = 0.0;
  double dstar_lo = 0.0;
  double dstar_hi = 0.0;
  Regime regime = Regime::Critical;
  BranchVerdict minus;
  BranchVerdict plus;
  std::optional<HopfSection> hopf;
  bool consistent = true;
  std::vector<std::string> unresolved;  // provenance of every unresolved sub-verdict

  bool resolved() const { return unresolved.empty(); }
  nlohmann::json to_json() const;
};

Regime classify_regime(double d, double dstar, double rel = 1e-3);
// ZERO never above, ATTRACTOR / PERIODIC never below.
bool regime_consistent(Regime r, Limit plus);

BandCheck band_check(const ManifoldSolution& sol, const EnvelopeData& env, double dt = 1e-3);

ConnectionDiagram connection_diagram(double c, double d, double k, int n, const DiagramOptions& opt = {});

}  // namespace ddelab
