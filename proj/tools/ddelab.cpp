#include "CLI11.hpp"

#include "ddelab/io.hpp"
#include "ddelab/parallel.hpp"
#include "ddelab/scenario.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace {

enum Exit { kOk = 0, kError = 1, kValidation = 2, kUnresolved = 3 };

struct Flags {
  std::vector<std::string> scenarios;
  std::string out;
  std::string name;
  std::map<std::string, double> numbers;
  std::map<std::string, int> ints;
  std::map<std::string, std::string> strings;
  std::vector<double> alpha;
  bool hopf = false;
};

// "limit:c,d" or "smooth:a,b,n", or a JSON object.
nlohmann::json parse_system(const std::string& s) {
  if (!s.empty() && s.front() == '{') return nlohmann::json::parse(s);
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ddelab::ValidationError({"--system: expected limit:c,d or smooth:a,b,n"});
  const std::string kind = s.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(s.substr(colon + 1));
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ddelab::ValidationError({"--system: bad number '" + cell + "'"});
    }
  }
  if (kind == "limit" && v.size() == 2) return {{"kind", "limit"}, {"c", v[0]}, {"d", v[1]}};
  if (kind == "smooth" && v.size() == 3)
    return {{"kind", "smooth"}, {"a", v[0]}, {"b", v[1]}, {"n", static_cast<int>(v[2])}};
  throw ddelab::ValidationError({"--system: expected limit:c,d or smooth:a,b,n"});
}

void overlay(nlohmann::json& doc, const Flags& f) {
  for (const auto& [k, v] : f.numbers) doc[k] = v;
  for (const auto& [k, v] : f.ints) doc[k] = v;
  for (const auto& [k, v] : f.strings) {
    if (k == "system")
      doc["system"] = parse_system(v);
    else
      doc[k] = v;
  }
  if (!f.alpha.empty()) doc["alpha_grid"] = f.alpha;
  if (f.hopf) doc["hopf"] = true;
  if (!f.name.empty()) doc["name"] = f.name;
}

struct Job {
  ddelab::Scenario scenario;
  std::optional<std::filesystem::path> out;
};

int run(const std::string& task, const Flags& f) {
  std::vector<Job> jobs;
  std::vector<std::string> errors;
  auto add = [&](nlohmann::json doc, const std::string& origin) {
    if (task != "run") {
      if (doc.contains("task") && doc["task"] != task) {
        errors.push_back(origin + ": task: scenario says " + doc["task"].dump() + " but the command is " + task);
        return;
      }
      doc["task"] = task;
    }
    overlay(doc, f);
    if (!doc.contains("name")) doc["name"] = task == "figure" && doc.contains("preset") && doc["preset"].is_string()
                                                 ? "figure-" + doc["preset"].get<std::string>()
                                                 : task;
    try {
      ddelab::Scenario sc = ddelab::validate_scenario(doc);
      std::optional<std::filesystem::path> out;
      if (!f.out.empty())
        out = f.scenarios.size() > 1 ? std::filesystem::path(f.out) / sc.name() : std::filesystem::path(f.out);
      jobs.push_back({std::move(sc), out});
    } catch (const ddelab::ValidationError& e) {
      for (const auto& m : e.errors()) errors.push_back(origin + ": " + m);
    }
  };
  try {
    for (const std::string& path : f.scenarios) {
      nlohmann::json doc = ddelab::read_json(path);
      if (doc.is_object() && doc.contains("manifest_version")) doc = doc.value("scenario", nlohmann::json::object());
      add(doc, path);
    }
    if (f.scenarios.empty()) {
      if (task == "run") errors.push_back("run: --scenario is required");
      else add(nlohmann::json::object(), "flags");
    }
  } catch (const ddelab::ValidationError& e) {
    for (const auto& m : e.errors()) errors.push_back(m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  if (!errors.empty()) {
    std::cerr << "invalid scenario:\n";
    for (const auto& m : errors) std::cerr << "  " << m << "\n";
    return kValidation;
  }

  std::vector<int> codes(jobs.size(), kOk);
  std::vector<std::string> lines(jobs.size());
  ddelab::parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    std::ostringstream os;
    try {
      const ddelab::RunResult r = ddelab::run_scenario(job.scenario, job.out);
      if (job.scenario.task() == "spectrum") os << ddelab::spectrum_table(r.report);
      if (job.scenario.task() == "threshold") os << r.report.dump() << "\n";
      os << job.scenario.name() << ": " << (r.resolved ? "ok" : "UNRESOLVED") << " -> " << r.output.string() << "\n";
      for (const auto& u : r.unresolved) os << "  unresolved: " << u << "\n";
      codes[i] = r.resolved ? kOk : kUnresolved;
    } catch (const std::exception& e) {
      os << job.scenario.name() << ": error: " << e.what() << "\n";
      codes[i] = kError;
    }
    lines[i] = os.str();
  });
  int code = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    (codes[i] == kError ? std::cerr : std::cout) << lines[i];
    if (codes[i] == kError) code = kError;
    else if (codes[i] == kUnresolved && code == kOk) code = kUnresolved;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddelab: delayed negative-feedback experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ddelab::kVersion));
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", f.scenarios, "Scenario JSON file(s) or manifests");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--name", f.name, "Scenario name when built from flags");
  };
  auto number = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<double>(flag, [&f, key](double v) { f.numbers[key] = v; }, help);
  };
  auto integer = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<int>(flag, [&f, key](int v) { f.ints[key] = v; }, help);
  };
  auto text = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&f, key](const std::string& v) { f.strings[key] = v; }, help);
  };
  const std::string sys_help = "System as limit:c,d or smooth:a,b,n";

  std::map<std::string, CLI::App*> subs;
  subs["run"] = app.add_subcommand("run", "Run scenarios with the task named in each file");
  subs["simulate"] = app.add_subcommand("simulate", "Integrate one history");
  subs["threshold"] = app.add_subcommand("threshold", "Bisect for d*");
  subs["envelope"] = app.add_subcommand("envelope", "Envelopes w0/w1 and the delta ledger");
  subs["manifold"] = app.add_subcommand("manifold", "Leading unstable solutions and landmarks");
  subs["spectrum"] = app.add_subcommand("spectrum", "Characteristic roots at the unstable point");
  subs["periodic"] = app.add_subcommand("periodic", "Periodic orbit, Floquet multipliers, attraction trials");
  subs["hopf"] = app.add_subcommand("hopf", "Small Hopf orbit search on an alpha grid");
  subs["diagram"] = app.add_subcommand("diagram", "Connection diagram");
  subs["figure"] = app.add_subcommand("figure", "Figure presets x1..x4");
  for (auto& [name, sub] : subs) common(sub);

  for (const char* t : {"simulate", "manifold", "spectrum", "periodic"}) text(subs[t], "--system", "system", sys_help);
  number(subs["simulate"], "--T", "T", "Horizon");
  number(subs["threshold"], "--c", "c", "Decay rate c");
  number(subs["threshold"], "--tol", "tol", "Relative bracket tolerance");
  number(subs["threshold"], "--Tmax", "t_max", "Classification horizon");
  number(subs["envelope"], "--c", "c", "Decay rate c");
  number(subs["envelope"], "--d", "d", "Gain d");
  number(subs["envelope"], "--d0", "d0", "Lower envelope gain");
  text(subs["manifold"], "--branch", "branch", "plus, minus or both");
  number(subs["manifold"], "--kappa", "kappa", "Normalising offset");
  number(subs["manifold"], "--eps-seed", "eps_seed", "Seed amplitude");
  number(subs["manifold"], "--T", "T", "Forward extent");
  integer(subs["spectrum"], "--count", "count", "Number of complex pairs");
  number(subs["periodic"], "--T", "T", "Horizon");
  integer(subs["periodic"], "--cells", "cells", "Monodromy mesh (0 skips)");
  for (const char* t : {"hopf", "diagram"}) {
    number(subs[t], "--c", "c", "Decay rate c");
    number(subs[t], "--d", "d", "Gain d");
    integer(subs[t], "--n", "n", "Hill exponent n");
    subs[t]->add_option("--alpha", f.alpha, "Alpha grid");
    integer(subs[t], "--cells", "cells", "Monodromy mesh (0 skips)");
  }
  subs["diagram"]->add_flag("--hopf", f.hopf, "Add the Hopf section");
  number(subs["diagram"], "--T", "T", "Horizon");
  text(subs["figure"], "--preset", "preset", "x1, x2, x3 or x4");
  number(subs["figure"], "--T", "T", "Diagnosis horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  for (auto& [name, sub] : subs)
    if (sub->parsed()) return run(name, f);
  return kError;
}
