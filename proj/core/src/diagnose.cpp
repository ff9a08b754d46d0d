#include "ddelab/diagnose.hpp"

#include "ddelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddelab {

std::string to_string(OmegaKind k) {
  switch (k) {
    case OmegaKind::ConvergesTo: return "CONVERGES_TO";
    case OmegaKind::Periodic: return "PERIODIC";
    case OmegaKind::BoundedUnresolved: return "BOUNDED_UNRESOLVED";
  }
  return "BOUNDED_UNRESOLVED";
}

nlohmann::json OrbitClassification::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)},
                      {"oscillation", oscillation},
                      {"tail_min", tail_min},
                      {"tail_max", tail_max}};
  if (kind == OmegaKind::ConvergesTo) j["value"] = value;
  if (orbit) j["orbit"] = orbit->to_json();
  return j;
}

OrbitClassification omega_diagnose(const Trajectory& traj, const DiagnoseOptions& opt) {
  if (!traj.system()) throw std::invalid_argument("omega_diagnose needs a trajectory with a system");
  const double T = traj.t_end();
  if (T - 3.0 * opt.window < -1.0) throw std::invalid_argument("trajectory shorter than three diagnosis windows");
  const SystemSpec& sys = *traj.system();
  OrbitClassification out;
  out.tail_min = traj.min_on(T - opt.window, T);
  out.tail_max = traj.max_on(T - opt.window, T);
  out.oscillation = out.tail_max - out.tail_min;
  if (out.oscillation < opt.tol) {
    const double mid = 0.5 * (out.tail_min + out.tail_max);
    const StationarySet set = stationary_points(sys, std::max(2.0, sys.band_upper()));
    for (const StationaryPoint& p : set.points) {
      if (std::abs(mid - p.value) < opt.tol) {
        out.kind = OmegaKind::ConvergesTo;
        out.value = p.value;
        return out;
      }
    }
  }
  // Long orbits need more than three windows; half the run is always offered.
  const double transient = std::max(0.0, std::min(T - 3.0 * opt.window, 0.5 * T));
  std::optional<PeriodicOrbit> orb = detect_periodic(traj, opt.level, transient, opt.periodic);
  if (!orb) {
    const double mid = 0.5 * (traj.min_on(transient, T) + traj.max_on(transient, T));
    if (std::abs(mid - opt.level) > 1e-9) orb = detect_periodic(traj, mid, transient, opt.periodic);
  }
  if (orb) {
    out.kind = OmegaKind::Periodic;
    out.orbit = std::move(orb);
  }
  return out;
}

}  // namespace ddelab
