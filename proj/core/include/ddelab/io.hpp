#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ddelab {

// Fixed formatting used by every data artifact.
std::string format_number(double v);

// Creates parent directories; bytes are written verbatim.
void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

// Header line plus one row per index; all columns must have equal length.
std::string csv_columns(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols);

struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  int column(const std::string& name) const;  // -1 when absent
};

CsvTable parse_csv(const std::string& text);

// 64-bit FNV-1a, reported in manifests.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace ddelab
