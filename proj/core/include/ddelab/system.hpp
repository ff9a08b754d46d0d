#pragma once

#include "ddelab/nonlinearity.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ddelab {

enum class SystemKind { Smooth, Limit };

// x'(t) = -decay x(t) + gain f(x(t-1)). Smooth systems carry a hill f_n (rates a, b),
// limit systems the power cutoff g (rates c, d).
struct SystemSpec {
  SystemKind kind = SystemKind::Limit;
  double decay = 1.0;
  double gain = 2.0;
  Feedback feedback = Feedback::power_cutoff(2.0);

  static SystemSpec limit(double c, double d, double k = 2.0);
  static SystemSpec smooth(double a, double b, double k, int n);

  // Structural checks only: positive finite rates and a matching nonlinearity.
  void validate() const;
  // Problems with respect to the regime gain > decay; empty when fine.
  std::vector<std::string> regime_warnings() const;

  double forcing(double xi) const { return gain * feedback.value(xi); }
  double forcing_derivative(double xi) const { return gain * feedback.derivative(xi); }

  // Invariant band upper edge: d/c for limit systems, 2b/a for smooth ones.
  double band_upper() const;
  // Lipschitz bound for t >= 1: 2d for limit systems, 8b for smooth ones.
  double lipschitz_bound() const;

  std::string describe() const;
  nlohmann::json to_json() const;
  static SystemSpec from_json(const nlohmann::json& j);
};

}  // namespace ddelab
