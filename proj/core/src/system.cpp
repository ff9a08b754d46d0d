#include "ddelab/system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddelab {

SystemSpec SystemSpec::limit(double c, double d, double k) {
  SystemSpec s;
  s.kind = SystemKind::Limit;
  s.decay = c;
  s.gain = d;
  s.feedback = Feedback::power_cutoff(k);
  s.validate();
  return s;
}

SystemSpec SystemSpec::smooth(double a, double b, double k, int n) {
  SystemSpec s;
  s.kind = SystemKind::Smooth;
  s.decay = a;
  s.gain = b;
  s.feedback = Feedback::hill(k, n);
  s.validate();
  return s;
}

void SystemSpec::validate() const {
  if (!(decay > 0.0) || !std::isfinite(decay)) throw std::invalid_argument("decay rate must be positive");
  if (!(gain > 0.0) || !std::isfinite(gain)) throw std::invalid_argument("gain must be positive");
  if (kind == SystemKind::Limit && feedback.kind() != FeedbackKind::PowerCutoff)
    throw std::invalid_argument("limit system needs a power-cutoff nonlinearity");
  if (kind == SystemKind::Smooth && feedback.kind() != FeedbackKind::Hill)
    throw std::invalid_argument("smooth system needs a hill nonlinearity");
}

std::vector<std::string> SystemSpec::regime_warnings() const {
  std::vector<std::string> w;
  if (!(gain > decay)) w.push_back("gain does not exceed decay; outside the bistable regime");
  return w;
}

double SystemSpec::band_upper() const {
  return kind == SystemKind::Limit ? gain / decay : 2.0 * gain / decay;
}

double SystemSpec::lipschitz_bound() const {
  return kind == SystemKind::Limit ? 2.0 * gain : 8.0 * gain;
}

std::string SystemSpec::describe() const {
  std::ostringstream os;
  os << (kind == SystemKind::Limit ? "limit(c=" : "smooth(a=") << decay
     << (kind == SystemKind::Limit ? ", d=" : ", b=") << gain << ", " << feedback.describe() << ")";
  return os.str();
}

nlohmann::json SystemSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == SystemKind::Limit ? "limit" : "smooth";
  if (kind == SystemKind::Limit) {
    j["c"] = decay;
    j["d"] = gain;
  } else {
    j["a"] = decay;
    j["b"] = gain;
  }
  j["nonlinearity"] = feedback.to_json();
  return j;
}

SystemSpec SystemSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("system needs a string 'kind' (\"smooth\" or \"limit\")");
  const std::string kind = j["kind"].get<std::string>();
  const bool lim = kind == "limit";
  if (!lim && kind != "smooth") throw std::invalid_argument("system.kind must be \"smooth\" or \"limit\"");
  const char* r1 = lim ? "c" : "a";
  const char* r2 = lim ? "d" : "b";
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "kind" && key != r1 && key != r2 && key != "nonlinearity")
      throw std::invalid_argument("unknown system field '" + key + "'");
  }
  if (!j.contains(r1) || !j[r1].is_number() || !j.contains(r2) || !j[r2].is_number())
    throw std::invalid_argument(std::string("system needs numeric '") + r1 + "' and '" + r2 + "'");
  SystemSpec s;
  s.kind = lim ? SystemKind::Limit : SystemKind::Smooth;
  s.decay = j[r1].get<double>();
  s.gain = j[r2].get<double>();
  if (j.contains("nonlinearity")) {
    s.feedback = Feedback::from_json(j["nonlinearity"]);
  } else if (!lim) {
    throw std::invalid_argument("smooth system needs a hill nonlinearity");
  }
  s.validate();
  return s;
}

}  // namespace ddelab
