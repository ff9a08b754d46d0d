#pragma once

#include "ddelab/integrator.hpp"
#include "ddelab/periodic.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace ddelab {

enum class OmegaKind { ConvergesTo, Periodic, BoundedUnresolved };

std::string to_string(OmegaKind k);

struct OrbitClassification {
  OmegaKind kind = OmegaKind::BoundedUnresolved;
  double value = 0.0;        // limit for ConvergesTo
  double oscillation = 0.0;  // max - min over the last window
  double tail_min = 0.0;
  double tail_max = 0.0;
  std::optional<PeriodicOrbit> orbit;
  nlohmann::json to_json() const;
};

struct DiagnoseOptions {
  double window = 20.0;
  double tol = 1e-6;
  double level = 1.0;  // Poincare level; the tail midpoint is tried when it is never crossed
  PeriodicOptions periodic;
};

// Numerical verdict on the tail of a trajectory that carries its system.
OrbitClassification omega_diagnose(const Trajectory& traj, const DiagnoseOptions& opt = {});

}  // namespace ddelab
