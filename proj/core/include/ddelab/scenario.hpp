#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddelab {

inline constexpr const char* kVersion = "0.1.0";

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

const std::vector<std::string>& scenario_tasks();

// Normalized scenario: every key present with its default filled in.
struct Scenario {
  nlohmann::json doc;
  std::string name() const { return doc.at("name").get<std::string>(); }
  std::string task() const { return doc.at("task").get<std::string>(); }
  std::filesystem::path output() const { return doc.at("output").get<std::string>(); }
};

// Checks every field and collects all problems ("path: message") before throwing.
Scenario validate_scenario(const nlohmann::json& raw);
// Accepts a scenario document or a manifest written by run_scenario.
Scenario load_scenario(const std::filesystem::path& path);

// Built-in figure parameter sets x1..x4 as raw figure scenarios.
nlohmann::json preset_scenario(const std::string& preset);
const std::vector<std::string>& preset_names();

struct Artifact {
  std::string file;  // relative to the output directory
  std::size_t bytes = 0;
  std::string fnv1a;
};

struct RunResult {
  bool resolved = true;
  std::vector<std::string> unresolved;  // provenance
  std::vector<Artifact> artifacts;
  nlohmann::json report;                // task summary, also written as summary.json
  std::filesystem::path output;
};

// Writes the task outputs plus manifest.json into the output directory (or `out` when given).
RunResult run_scenario(const Scenario& sc, const std::optional<std::filesystem::path>& out = std::nullopt);

// Fixed-width rendering of a spectrum task report.
std::string spectrum_table(const nlohmann::json& report);

}  // namespace ddelab
