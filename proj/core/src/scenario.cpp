#include "ddelab/scenario.hpp"

#include "ddelab/diagnose.hpp"
#include "ddelab/diagram.hpp"
#include "ddelab/io.hpp"
#include "ddelab/manifold.hpp"
#include "ddelab/periodic.hpp"
#include "ddelab/spectrum.hpp"
#include "ddelab/svg.hpp"
#include "ddelab/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace ddelab {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid scenario:";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

const std::vector<std::string>& scenario_tasks() {
  static const std::vector<std::string> tasks{"simulate", "threshold", "envelope", "manifold", "spectrum",
                                              "periodic", "hopf",      "diagram",  "figure"};
  return tasks;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"x1", "x2", "x3", "x4"};
  return names;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

enum class Kind { Number, Integer, String, Bool, Enum, NumberArray, IntArray, Object, Raw };

struct Field {
  std::string key;
  Kind kind = Kind::Number;
  bool required = false;
  nlohmann::json def;                 // null: optional without default
  std::optional<double> gt;           // strict lower bound
  std::optional<double> ge;           // lower bound
  std::optional<double> le;           // upper bound
  std::vector<std::string> choices;   // Enum
  std::vector<Field> children;        // Object
};

Field num(std::string key, nlohmann::json def = nullptr) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Number;
  f.def = std::move(def);
  return f;
}
Field pos(std::string key, nlohmann::json def = nullptr) {
  Field f = num(std::move(key), std::move(def));
  f.gt = 0.0;
  return f;
}
Field integer(std::string key, nlohmann::json def, double ge) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Integer;
  f.def = std::move(def);
  f.ge = ge;
  return f;
}
Field boolean(std::string key, bool def) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Bool;
  f.def = def;
  return f;
}
Field text(std::string key, nlohmann::json def = nullptr) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::String;
  f.def = std::move(def);
  return f;
}
Field choice(std::string key, std::vector<std::string> choices, nlohmann::json def = nullptr) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Enum;
  f.choices = std::move(choices);
  f.def = std::move(def);
  return f;
}
Field array(std::string key, Kind kind, nlohmann::json def = nullptr) {
  Field f;
  f.key = std::move(key);
  f.kind = kind;
  f.def = std::move(def);
  return f;
}
Field object(std::string key, std::vector<Field> children, bool fill = true) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Object;
  f.children = std::move(children);
  if (fill) f.def = nlohmann::json::object();
  return f;
}
Field raw(std::string key) {
  Field f;
  f.key = std::move(key);
  f.kind = Kind::Raw;
  return f;
}
Field req(Field f) {
  f.required = true;
  return f;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_bounds(const Field& f, double v, const std::string& path, std::vector<std::string>& errors) {
  char buf[96];
  if (!std::isfinite(v)) {
    errors.push_back(path + ": must be finite");
    return;
  }
  if (f.gt && !(v > *f.gt)) {
    std::snprintf(buf, sizeof buf, ": must be > %g", *f.gt);
    errors.push_back(path + buf);
  }
  if (f.ge && !(v >= *f.ge)) {
    std::snprintf(buf, sizeof buf, ": must be >= %g", *f.ge);
    errors.push_back(path + buf);
  }
  if (f.le && !(v <= *f.le)) {
    std::snprintf(buf, sizeof buf, ": must be <= %g", *f.le);
    errors.push_back(path + buf);
  }
}

void validate_object(const nlohmann::json& in, const std::vector<Field>& fields, const std::string& path,
                     nlohmann::json& out, std::vector<std::string>& errors);

void validate_value(const Field& f, const nlohmann::json& v, const std::string& path, nlohmann::json& out,
                    std::vector<std::string>& errors) {
  switch (f.kind) {
    case Kind::Number:
      if (!v.is_number()) {
        errors.push_back(path + ": must be a number");
        return;
      }
      check_bounds(f, v.get<double>(), path, errors);
      out = v.get<double>();
      return;
    case Kind::Integer:
      if (!v.is_number_integer()) {
        errors.push_back(path + ": must be an integer");
        return;
      }
      check_bounds(f, static_cast<double>(v.get<long long>()), path, errors);
      out = v.get<long long>();
      return;
    case Kind::String:
      if (!v.is_string() || v.get<std::string>().empty()) {
        errors.push_back(path + ": must be a non-empty string");
        return;
      }
      out = v;
      return;
    case Kind::Bool:
      if (!v.is_boolean()) {
        errors.push_back(path + ": must be true or false");
        return;
      }
      out = v;
      return;
    case Kind::Enum: {
      if (!v.is_string() || std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
        std::string all;
        for (const auto& c : f.choices) all += (all.empty() ? "" : ", ") + c;
        errors.push_back(path + ": must be one of " + all);
        return;
      }
      out = v;
      return;
    }
    case Kind::NumberArray:
    case Kind::IntArray: {
      if (!v.is_array() || v.empty()) {
        errors.push_back(path + ": must be a non-empty array");
        return;
      }
      out = nlohmann::json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const bool ok = f.kind == Kind::IntArray ? v[i].is_number_integer() : v[i].is_number();
        if (!ok) {
          errors.push_back(p + (f.kind == Kind::IntArray ? ": must be an integer" : ": must be a number"));
          continue;
        }
        check_bounds(f, v[i].get<double>(), p, errors);
        out.push_back(v[i]);
      }
      return;
    }
    case Kind::Object:
      if (!v.is_object()) {
        errors.push_back(path + ": must be an object");
        return;
      }
      out = nlohmann::json::object();
      validate_object(v, f.children, path, out, errors);
      return;
    case Kind::Raw:
      out = v;
      return;
  }
}

void validate_object(const nlohmann::json& in, const std::vector<Field>& fields, const std::string& path,
                     nlohmann::json& out, std::vector<std::string>& errors) {
  for (auto it = in.begin(); it != in.end(); ++it) {
    const bool known = std::any_of(fields.begin(), fields.end(), [&](const Field& f) { return f.key == it.key(); });
    if (!known) errors.push_back(join(path, it.key()) + ": unknown key");
  }
  for (const Field& f : fields) {
    const std::string p = join(path, f.key);
    if (!in.contains(f.key)) {
      if (f.required) {
        errors.push_back(p + ": required");
      } else if (f.kind == Kind::Object && !f.def.is_null()) {
        nlohmann::json sub = nlohmann::json::object();
        validate_object(nlohmann::json::object(), f.children, p, sub, errors);
        out[f.key] = sub;
      } else if (!f.def.is_null()) {
        out[f.key] = f.def;
      }
      continue;
    }
    nlohmann::json v;
    validate_value(f, in.at(f.key), p, v, errors);
    if (!v.is_null()) out[f.key] = v;
  }
}

Field rate_k() {
  Field f = num("k", 2.0);
  f.gt = 1.0;
  return f;
}

Field system_field(bool required) {
  Field n = integer("n", nullptr, 2);
  Field f = object("system", {choice("kind", {"smooth", "limit"}, "smooth"), pos("a"), pos("b"), pos("c"), pos("d"),
                              rate_k(), n},
                   false);
  f.required = required;
  return f;
}

Field numerics_field() {
  return object("numerics", {integer("N", 200, 10), pos("dense_tol", 1e-10), boolean("refine", true),
                             integer("max_refine_depth", 12, 0)});
}

std::vector<Field> task_fields(const std::string& task) {
  const Field c = pos("c");
  const Field d = pos("d");
  const Field n = integer("n", 200, 2);
  Field alpha = array("alpha_grid", Kind::NumberArray,
                      nlohmann::json::array({0.2, 0.1, 0.05, 0.02, -0.02, -0.05, -0.1, -0.2}));
  alpha.ge = -0.5;
  alpha.le = 0.5;
  if (task == "simulate")
    return {req(system_field(true)), raw("history"), pos("T", 20.0), integer("stride", 1, 1),
            boolean("diagnose", false)};
  if (task == "threshold")
    return {req(c), rate_k(), pos("tol", 1e-6), pos("t_max", 400.0), pos("d_lo"), pos("d_hi")};
  if (task == "envelope")
    return {req(c), req(d), pos("d0"), pos("d1"), rate_k(), array("n_grid", Kind::IntArray), pos("t_max", 400.0)};
  if (task == "manifold")
    return {req(system_field(true)), choice("branch", {"plus", "minus", "both"}, "both"), num("kappa"),
            pos("eps_seed"), pos("T", 30.0), pos("dt", 0.01)};
  if (task == "spectrum") return {req(system_field(true)), integer("count", 5, 1)};
  if (task == "periodic")
    return {req(system_field(true)), raw("history"), pos("T", 300.0), pos("level", 1.0), integer("cells", 200, 0),
            object("attraction", {pos("eps", 0.1), integer("trials", 0, 0), integer("seed", 20240611, 0)})};
  if (task == "hopf")
    return {c, req(d), rate_k(), n, integer("j", 1, 1), alpha, integer("cells", 100, 0), pos("amplitude_max", 0.2)};
  if (task == "diagram")
    return {req(c), req(d), rate_k(), n, pos("dstar"), boolean("hopf", false), alpha, pos("T", 300.0),
            integer("cells", 200, 0), array("hopf_seeds", Kind::NumberArray, nlohmann::json::array({1e-3}))};
  if (task == "figure")
    return {req(choice("preset", preset_names())), pos("T", 300.0), pos("plot_T", 40.0), integer("cells", 0, 0)};
  return {};
}

// Cross-field checks on the normalized system block.
void check_system(const nlohmann::json& s, const std::string& path, std::vector<std::string>& errors) {
  const bool smooth = s.value("kind", "smooth") == "smooth";
  const char* own[2] = {smooth ? "a" : "c", smooth ? "b" : "d"};
  const char* other[2] = {smooth ? "c" : "a", smooth ? "d" : "b"};
  const std::string kind = smooth ? "smooth" : "limit";
  for (int i = 0; i < 2; ++i) {
    if (!s.contains(own[i])) errors.push_back(join(path, own[i]) + ": required for a " + kind + " system");
    if (s.contains(other[i])) errors.push_back(join(path, other[i]) + ": not used by a " + kind + " system");
  }
  if (!smooth && s.contains("n")) errors.push_back(join(path, "n") + ": not used by a limit system");
}

}  // namespace

Scenario validate_scenario(const nlohmann::json& raw_doc) {
  std::vector<std::string> errors;
  if (!raw_doc.is_object()) throw ValidationError({"scenario: must be a JSON object"});
  std::vector<Field> fields{req(text("name")), req(choice("task", scenario_tasks())), text("output"),
                            numerics_field()};
  std::string task;
  if (raw_doc.contains("task") && raw_doc["task"].is_string()) task = raw_doc["task"].get<std::string>();
  for (Field& f : task_fields(task)) fields.push_back(std::move(f));

  nlohmann::json out = nlohmann::json::object();
  validate_object(raw_doc, fields, "", out, errors);

  if (out.contains("name") && !out.contains("output")) out["output"] = "out/" + out["name"].get<std::string>();
  if (out.contains("system") && out["system"].is_object()) {
    nlohmann::json& s = out["system"];
    check_system(s, "system", errors);
    if (s.value("kind", "smooth") == "smooth" && !s.contains("n")) s["n"] = 200;
    const bool smooth = s.value("kind", "smooth") == "smooth";
    if (task == "periodic" && !smooth) errors.push_back("system.kind: periodic needs a smooth system");
  }
  if (raw_doc.contains("history")) {
    try {
      (void)HistoryFunction::from_json(raw_doc["history"]);
    } catch (const std::exception& e) {
      errors.push_back(std::string("history: ") + e.what());
    }
  } else if (task == "simulate") {
    out["history"] = {{"kind", "constant"}, {"value", 1.0}};
  }
  auto number = [&](const char* key) { return out.contains(key) ? out[key].get<double>() : NAN; };
  if (task == "threshold" && (out.contains("d_lo") != out.contains("d_hi")))
    errors.push_back(std::string(out.contains("d_lo") ? "d_hi" : "d_lo") + ": d_lo and d_hi go together");
  if (task == "threshold" && out.contains("d_lo") && out.contains("d_hi") && !(number("d_lo") < number("d_hi")))
    errors.push_back("d_hi: must exceed d_lo");
  if ((task == "envelope" || task == "diagram" || task == "hopf") && out.contains("c") && out.contains("d") &&
      !(number("d") > number("c")))
    errors.push_back("d: must exceed c");
  if (task == "envelope" && out.contains("d0") && out.contains("d") && out.contains("c") &&
      !(number("d0") > number("c") && number("d0") < number("d")))
    errors.push_back("d0: must lie in (c, d)");
  if (task == "threshold" && out.contains("tol") && number("tol") < 1e-6) errors.push_back("tol: must be >= 1e-06");
  if (task == "diagram" || task == "periodic")
    if (out.contains("T") && number("T") < 60.0) errors.push_back("T: must be >= 60 for limit diagnosis");
  if (task == "figure" && out.contains("T") && number("T") < 60.0)
    errors.push_back("T: must be >= 60 for limit diagnosis");
  if (task == "simulate" && out.value("diagnose", false) && out.contains("T") && number("T") < 60.0)
    errors.push_back("T: must be >= 60 when diagnose is set");

  if (!errors.empty()) throw ValidationError(errors);
  return Scenario{out};
}

Scenario load_scenario(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = read_json(path);
  } catch (const std::exception& e) {
    throw ValidationError({std::string("scenario: ") + e.what()});
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("scenario")) throw ValidationError({"scenario: manifest without a scenario block"});
    return validate_scenario(j["scenario"]);
  }
  return validate_scenario(j);
}

nlohmann::json preset_scenario(const std::string& preset) {
  if (std::find(preset_names().begin(), preset_names().end(), preset) == preset_names().end())
    throw ValidationError({"preset: unknown preset '" + preset + "'"});
  return {{"name", "figure-" + preset}, {"task", "figure"}, {"preset", preset}};
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct FigurePreset {
  double c;
  double d;
  int n;
  bool hopf;
};

FigurePreset figure_preset(const std::string& p) {
  const double hc = prototype_hopf_c(1);
  if (p == "x1") return {1.0, 7.38, 200, false};
  if (p == "x2") return {4.0, 12.71, 200, false};
  if (p == "x3") return {hc, 7.95, 200, true};
  return {hc, 25.0, 200, true};
}

IntegratorOptions integrator_of(const nlohmann::json& doc) {
  const nlohmann::json& nm = doc.at("numerics");
  IntegratorOptions o;
  o.steps_per_delay = nm.at("N").get<int>();
  o.dense_tol = nm.at("dense_tol").get<double>();
  o.refine = nm.at("refine").get<bool>();
  o.max_refine_depth = nm.at("max_refine_depth").get<int>();
  return o;
}

SystemSpec system_of(const nlohmann::json& s) {
  const double k = s.at("k").get<double>();
  if (s.at("kind") == "limit") return SystemSpec::limit(s.at("c").get<double>(), s.at("d").get<double>(), k);
  return SystemSpec::smooth(s.at("a").get<double>(), s.at("b").get<double>(), k, s.at("n").get<int>());
}

class Writer {
 public:
  Writer(std::filesystem::path dir, RunResult& res) : dir_(std::move(dir)), res_(res) {}
  void text(const std::string& name, const std::string& content) {
    write_text(dir_ / name, content);
    res_.artifacts.push_back({name, content.size(), hex64(fnv1a(content))});
  }
  void json(const std::string& name, const nlohmann::json& j) { text(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  RunResult& res_;
};

void unresolved(RunResult& res, const std::string& why) {
  res.resolved = false;
  res.unresolved.push_back(why);
}

Series sample_series(const std::function<double(double)>& f, double a, double b, double dt, const std::string& label,
                     SeriesRole role) {
  Series s;
  s.label = label;
  s.role = role;
  const long steps = std::max(1L, static_cast<long>(std::llround((b - a) / dt)));
  for (long i = 0; i <= steps; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / steps;
    s.t.push_back(t);
    s.x.push_back(f(t));
    s.x_delayed.push_back(f(t - 1.0));
  }
  return s;
}

std::string series_csv(const Series& s) {
  return csv_columns({"t", "x", "x_delayed"}, {s.t, s.x, s.x_delayed});
}

std::string orbit_csv(const PeriodicOrbit& o, int count = 400) {
  std::vector<double> th, x, xd;
  for (int i = 0; i <= count; ++i) {
    const double t = o.period * i / count;
    th.push_back(t);
    x.push_back(o.value(t));
    xd.push_back(o.value(t - 1.0));
  }
  return csv_columns({"t", "x", "x_delayed"}, {th, x, xd});
}

void run_simulate(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const SystemSpec sys = system_of(doc.at("system"));
  const HistoryFunction h = HistoryFunction::from_json(doc.at("history"));
  const double T = doc.at("T").get<double>();
  const Trajectory tr = integrate(sys, h, T, integrator_of(doc));
  w.text("trajectory.csv", tr.to_csv(doc.at("stride").get<int>()));
  w.json("events.json", tr.events_json());
  const BoundsReport b = check_bounds(tr);
  res.report = {{"system", sys.to_json()},
                {"T", T},
                {"max", b.max_value},
                {"min", b.min_value},
                {"lipschitz", b.lipschitz},
                {"band_upper", b.band_upper},
                {"lipschitz_bound", b.lipschitz_bound},
                {"start_in_band", b.start_in_band},
                {"in_band", b.in_band},
                {"lipschitz_ok", b.lipschitz_ok}};
  if (doc.at("diagnose").get<bool>()) {
    const OrbitClassification oc = omega_diagnose(tr);
    res.report["omega"] = oc.to_json();
    if (oc.kind == OmegaKind::BoundedUnresolved) unresolved(res, "simulate: omega limit unresolved");
  }
  const Series s = sample_series([&](double t) { return tr.value(t); }, 0.0, T, std::min(0.01, T / 1000.0),
                                 "x(t)", SeriesRole::Plus);
  w.text("plot.svg", render_svg({s}, {sys.describe()}));
}

void run_threshold(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const double c = doc.at("c").get<double>();
  ThresholdOptions to;
  to.t_max = doc.at("t_max").get<double>();
  to.integrator = integrator_of(doc);
  const double k = doc.at("k").get<double>();
  const double tol = doc.at("tol").get<double>();
  const DStarResult r = doc.contains("d_lo")
                            ? find_dstar(c, doc["d_lo"].get<double>(), doc["d_hi"].get<double>(), tol, k, to)
                            : find_dstar_auto(c, tol, k, to);
  res.report = r.to_json();
  w.json("threshold.json", res.report);
  for (const ZClassification& z : r.unresolved) unresolved(res, "threshold: d = " + format_number(z.d) + " unresolved");
}

void run_envelope(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const double c = doc.at("c").get<double>();
  const double d = doc.at("d").get<double>();
  const double k = doc.at("k").get<double>();
  ThresholdOptions to;
  to.t_max = doc.at("t_max").get<double>();
  to.integrator = integrator_of(doc);
  double d0 = 0.0;
  nlohmann::json dstar = nullptr;
  if (doc.contains("d0")) {
    d0 = doc["d0"].get<double>();
  } else {
    const DStarResult r = find_dstar_auto(c, 1e-6, k, to);
    for (const ZClassification& z : r.unresolved)
      unresolved(res, "envelope: d* classification at d = " + format_number(z.d) + " unresolved");
    dstar = r.dstar;
    d0 = 0.5 * (r.dstar + d);
  }
  const double d1 = doc.contains("d1") ? doc["d1"].get<double>() : d;
  const EnvelopeData env = envelopes(c, d, d0, d1, k, to);
  res.report = env.to_json();
  if (!dstar.is_null()) res.report["dstar"] = dstar;
  if (doc.contains("n_grid")) {
    nlohmann::json rows = nlohmann::json::array();
    std::vector<int> grid = doc["n_grid"].get<std::vector<int>>();
    for (int n : grid) rows.push_back(check_n_ledger(env, n).to_json());
    res.report["ledger_rows"] = rows;
    res.report["smallest_n"] = smallest_ledger_n(env, grid);
  }
  w.json("envelope.json", res.report);
  const Series s = sample_series([&](double t) { return env.w0_at(t); }, 1.0, env.tau0 + 1.0, 0.005, "w0",
                                 SeriesRole::Other);
  w.text("w0.csv", series_csv(s));
}

void run_manifold(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const SystemSpec sys = system_of(doc.at("system"));
  ManifoldOptions mo;
  mo.horizon = doc.at("T").get<double>();
  mo.integrator = integrator_of(doc);
  if (doc.contains("kappa")) mo.kappa = doc["kappa"].get<double>();
  if (doc.contains("eps_seed")) mo.eps_seed = doc["eps_seed"].get<double>();
  const std::string which = doc.at("branch").get<std::string>();
  const double dt = doc.at("dt").get<double>();
  std::vector<Series> plot;
  res.report = {{"system", sys.to_json()}};
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const std::string name = to_string(b);
    if (which != "both" && which != name) continue;
    ManifoldOptions o = mo;
    if (which == "both" && mo.kappa && ((b == Branch::Plus) != (*mo.kappa > 0.0))) o.kappa.reset();
    const ManifoldSolution sol = shoot_branch(sys, b, o);
    w.text("manifold_" + name + ".csv", sol.to_csv(dt));
    nlohmann::json lm = sol.landmarks.to_json();
    lm["xi_star"] = sol.xi_star;
    lm["lambda0"] = sol.lambda0;
    lm["kappa"] = sol.kappa;
    lm["eps_seed"] = sol.eps_seed;
    lm["shift"] = sol.shift;
    w.json("landmarks_" + name + ".json", lm);
    res.report[name] = lm;
    plot.push_back(sample_series([&](double t) { return sol.value(t); }, std::max(sol.t_min() + 1.0, -2.0),
                                 sol.t_max(), 0.01, "y" + std::string(b == Branch::Plus ? "+" : "-"),
                                 b == Branch::Plus ? SeriesRole::Plus : SeriesRole::Minus));
    if (plot.size() == 1) {
      const double xi = sol.xi_star;
      plot.push_back(sample_series([xi](double) { return xi; }, plot[0].t.front(), plot[0].t.back(), 0.5,
                                   "stationary", SeriesRole::Stationary));
    }
  }
  w.text("manifold.svg", render_svg(plot, {sys.describe()}));
}

void run_spectrum(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const SystemSpec sys = system_of(doc.at("system"));
  const SpectrumReport sp = spectrum_at_unstable_point(sys, doc.at("count").get<int>());
  const StationarySet st = stationary_points(sys, std::max(2.0, sys.band_upper()));
  nlohmann::json pts = nlohmann::json::array();
  for (const StationaryPoint& p : st.points)
    pts.push_back({{"value", p.value},
                   {"stability", p.stability == Stability::Unstable ? "unstable" : "stable-candidate"},
                   {"residual", p.residual}});
  res.report = sp.to_json();
  res.report["system"] = sys.to_json();
  res.report["stationary_points"] = pts;
  w.json("spectrum.json", res.report);
}

HistoryFunction periodic_start(const nlohmann::json& doc, const SystemSpec& sys, const IntegratorOptions& io,
                               Trajectory& out, double T) {
  if (doc.contains("history")) {
    const HistoryFunction h = HistoryFunction::from_json(doc["history"]);
    out = integrate(sys, h, T, io);
    return h;
  }
  ManifoldOptions mo;
  mo.horizon = T;
  mo.integrator = io;
  ManifoldSolution sol = shoot_branch(sys, Branch::Plus, mo);
  out = std::move(sol.traj);
  return out.history();
}

void run_periodic(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const SystemSpec sys = system_of(doc.at("system"));
  const IntegratorOptions io = integrator_of(doc);
  const double T = doc.at("T").get<double>();
  Trajectory tr;
  periodic_start(doc, sys, io, tr, T);
  DiagnoseOptions dopt;
  dopt.level = doc.at("level").get<double>();
  const OrbitClassification oc = omega_diagnose(tr, dopt);
  res.report = {{"system", sys.to_json()}, {"start", doc.contains("history") ? "history" : "plus-branch"},
                {"omega", oc.to_json()}};
  if (oc.kind == OmegaKind::BoundedUnresolved) unresolved(res, "periodic: omega limit unresolved");
  if (!oc.orbit) {
    w.json("periodic.json", res.report);
    return;
  }
  w.text("orbit.csv", orbit_csv(*oc.orbit));
  const int cells = doc.at("cells").get<int>();
  if (cells > 0) {
    const FloquetReport fr = monodromy_multipliers(*oc.orbit, cells, io);
    res.report["floquet"] = fr.to_json();
  }
  const nlohmann::json& at = doc.at("attraction");
  if (at.at("trials").get<int>() > 0) {
    AttractionOptions ao;
    ao.seed = at.at("seed").get<std::uint64_t>();
    ao.integrator = io;
    const AttractionReport ar = verify_attraction(*oc.orbit, at.at("eps").get<double>(), at.at("trials").get<int>(), ao);
    res.report["attraction"] = ar.to_json();
  }
  w.json("periodic.json", res.report);
}

HopfSearchOptions hopf_options(const nlohmann::json& doc, const IntegratorOptions& io) {
  HopfSearchOptions ho;
  ho.alpha_grid = doc.at("alpha_grid").get<std::vector<double>>();
  ho.j = doc.contains("j") ? doc["j"].get<int>() : 1;
  if (doc.contains("amplitude_max")) ho.amplitude_max = doc["amplitude_max"].get<double>();
  ho.integrator = io;
  return ho;
}

void run_hopf(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const IntegratorOptions io = integrator_of(doc);
  const HopfSearchOptions ho = hopf_options(doc, io);
  const double c = doc.contains("c") ? doc["c"].get<double>() : prototype_hopf_c(ho.j);
  const HopfSearchResult r =
      hopf_orbit_search(c, doc.at("d").get<double>(), doc.at("k").get<double>(), doc.at("n").get<int>(), ho);
  res.report = r.to_json();
  if (const HopfCandidate* cand = r.orbit()) {
    w.text("hopf_orbit.csv", orbit_csv(*cand->orbit));
    const int cells = doc.at("cells").get<int>();
    if (cells > 0) res.report["floquet"] = monodromy_multipliers(*cand->orbit, cells, io).to_json();
  }
  w.json("hopf.json", res.report);
}

DiagramOptions diagram_options(const nlohmann::json& doc, const IntegratorOptions& io) {
  DiagramOptions o;
  o.horizon = doc.at("T").get<double>();
  o.hopf_horizon = o.horizon;
  o.floquet_cells = doc.at("cells").get<int>();
  o.manifold.integrator = io;
  o.threshold.integrator = io;
  o.hopf_search.integrator = io;
  return o;
}

void diagram_to_result(const ConnectionDiagram& g, RunResult& res) {
  for (const std::string& u : g.unresolved) unresolved(res, "diagram: " + u);
}

void run_diagram(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const IntegratorOptions io = integrator_of(doc);
  DiagramOptions o = diagram_options(doc, io);
  if (doc.contains("dstar")) o.dstar = doc["dstar"].get<double>();
  o.hopf = doc.at("hopf").get<bool>();
  o.hopf_search = hopf_options(doc, io);
  o.hopf_seeds = doc.at("hopf_seeds").get<std::vector<double>>();
  const ConnectionDiagram g = connection_diagram(doc.at("c").get<double>(), doc.at("d").get<double>(),
                                                 doc.at("k").get<double>(), doc.at("n").get<int>(), o);
  res.report = g.to_json();
  diagram_to_result(g, res);
  w.json("diagram.json", res.report);
}

void run_figure(const nlohmann::json& doc, Writer& w, RunResult& res) {
  const std::string preset = doc.at("preset").get<std::string>();
  const FigurePreset fp = figure_preset(preset);
  const IntegratorOptions io = integrator_of(doc);
  DiagramOptions o = diagram_options(doc, io);
  o.hopf = fp.hopf;
  if (fp.hopf) o.floquet_cells = 0;
  const ConnectionDiagram g = connection_diagram(fp.c, fp.d, 2.0, fp.n, o);
  res.report = g.to_json();
  res.report["preset"] = preset;
  diagram_to_result(g, res);
  w.json("diagram.json", res.report);

  const double plot_T = doc.at("plot_T").get<double>();
  const double dt = 0.005;
  const SystemSpec sys = SystemSpec::smooth(fp.c, fp.d, 2.0, fp.n);
  std::vector<Series> plot;
  ManifoldOptions mo = o.manifold;
  mo.horizon = plot_T + 1.0;
  const ManifoldSolution up = shoot_branch(sys, Branch::Plus, mo);
  const ManifoldSolution down = shoot_branch(sys, Branch::Minus, mo);
  plot.push_back(sample_series([&](double t) { return up.value(t); }, -2.0, plot_T, dt, "y+ (plus branch)",
                               SeriesRole::Plus));
  plot.push_back(sample_series([&](double t) { return down.value(t); }, -2.0, plot_T, dt, "y- (minus branch)",
                               SeriesRole::Minus));
  const double xi = up.xi_star;
  plot.push_back(sample_series([xi](double) { return xi; }, -2.0, plot_T, 0.5, "stationary xi_1n",
                               SeriesRole::Stationary));
  w.text("plus.csv", series_csv(plot[0]));
  w.text("minus.csv", series_csv(plot[1]));
  w.text("stationary.csv", series_csv(plot[2]));

  if (g.hopf && g.hopf->present()) {
    const HopfCandidate& cand = *g.hopf->search.orbit();
    const PeriodicOrbit& q = *cand.orbit;
    w.text("hopf_orbit.csv", orbit_csv(q));
    Series hs = sample_series([&](double t) { return q.value(t); }, 0.0, std::min(plot_T, 4.0 * q.period), dt,
                              "Hopf orbit Q", SeriesRole::Hopf);
    plot.push_back(hs);
    if (g.hopf->floquet && g.hopf->floquet->has_unstable && !o.hopf_seeds.empty()) {
      const std::vector<double>& psi = g.hopf->floquet->psi_u;
      const int cells = static_cast<int>(psi.size()) - 1;
      std::vector<double> mesh(cells + 1);
      for (int i = 0; i <= cells; ++i) mesh[i] = -1.0 + static_cast<double>(i) / cells;
      mesh[cells] = 0.0;
      const HistoryFunction dir = HistoryFunction::piecewise_linear(mesh, psi);
      for (int side : {1, -1}) {
        const Trajectory tr = integrate(q.system, q.q0.plus(dir, side * o.hopf_seeds.front()), plot_T, io);
        Series s = sample_series([&](double t) { return tr.value(t); }, 0.0, plot_T, dt,
                                 side > 0 ? "Q + s psi_u" : "Q - s psi_u",
                                 side > 0 ? SeriesRole::Plus : SeriesRole::Minus);
        w.text(side > 0 ? "hopf_seed_plus.csv" : "hopf_seed_minus.csv", series_csv(s));
      }
    }
  }
  PlotStyle style;
  char title[128];
  std::snprintf(title, sizeof title, "%s: a = %.6g, b = %.6g, n = %d", preset.c_str(), fp.c, fp.d, fp.n);
  style.title = title;
  w.text("figure.svg", render_svg(plot, style));
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const std::optional<std::filesystem::path>& out) {
  RunResult res;
  res.output = out ? *out : sc.output();
  std::filesystem::create_directories(res.output);
  Writer w(res.output, res);
  static const std::map<std::string, std::function<void(const nlohmann::json&, Writer&, RunResult&)>> tasks{
      {"simulate", run_simulate}, {"threshold", run_threshold}, {"envelope", run_envelope},
      {"manifold", run_manifold}, {"spectrum", run_spectrum},   {"periodic", run_periodic},
      {"hopf", run_hopf},         {"diagram", run_diagram},     {"figure", run_figure}};
  tasks.at(sc.task())(sc.doc, w, res);
  w.json("summary.json", res.report);

  nlohmann::json arts = nlohmann::json::array();
  for (const Artifact& a : res.artifacts) arts.push_back({{"file", a.file}, {"bytes", a.bytes}, {"fnv1a", a.fnv1a}});
  const nlohmann::json manifest = {{"manifest_version", 1},
                                   {"ddelab_version", kVersion},
                                   {"scenario", sc.doc},
                                   {"resolved", res.resolved},
                                   {"unresolved", res.unresolved},
                                   {"artifacts", arts}};
  write_json(res.output / "manifest.json", manifest);
  return res;
}

std::string spectrum_table(const nlohmann::json& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "a = %.10g  mu = %.10g\n", r.at("a").get<double>(), r.at("mu").get<double>());
  out += buf;
  std::snprintf(buf, sizeof buf, "%-4s %22s %22s %12s %8s\n", "j", "Re lambda", "Im lambda", "residual", "method");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-4d %22.14e %22.14e %12s %8s\n", 0, r.at("lambda0").get<double>(), 0.0, "-",
                "real");
  out += buf;
  for (const auto& p : r.at("pairs")) {
    const bool hole = p.value("hole", false);
    std::snprintf(buf, sizeof buf, "%-4d %22.14e %22.14e %12.3e %8s\n", p.at("j").get<int>(), p.at("re").get<double>(),
                  p.at("im").get<double>(), p.at("residual").get<double>(),
                  hole ? "hole" : (p.value("newton", true) ? "newton" : "phase"));
    out += buf;
  }
  if (r.contains("stationary_points")) {
    std::snprintf(buf, sizeof buf, "%-18s %22s %12s\n", "stationary", "value", "residual");
    out += buf;
    for (const auto& s : r["stationary_points"]) {
      std::snprintf(buf, sizeof buf, "%-18s %22.14e %12.3e\n", s.at("stability").get<std::string>().c_str(),
                    s.at("value").get<double>(), s.at("residual").get<double>());
      out += buf;
    }
  }
  return out;
}

}  // namespace ddelab
