#include <doctest.h>

#include "ddelab/io.hpp"
#include "ddelab/scenario.hpp"
#include "ddelab/svg.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <regex>
#include <set>

using namespace ddelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(DDELAB_TEST_DATA) / name;
  fs::remove_all(p);
  return p;
}

std::vector<std::string> errors_of(const nlohmann::json& raw) {
  try {
    validate_scenario(raw);
  } catch (const ValidationError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

// Data artifacts of a run directory, keyed by file name.
std::map<std::string, std::string> data_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_text(e.path());
  return out;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("negative d is rejected with its path") {
  const auto errs = errors_of({{"name", "bad"}, {"task", "simulate"}, {"system", {{"kind", "limit"}, {"c", 1.0}, {"d", -2.0}}}});
  REQUIRE_FALSE(errs.empty());
  CHECK(mentions(errs, "system.d"));
}

TEST_CASE("every problem is listed") {
  const auto errs = errors_of({{"name", "bad"},
                               {"task", "threshold"},
                               {"c", -1.0},
                               {"tol", 1e-9},
                               {"colour", "red"},
                               {"numerics", {{"N", 3}}}});
  CHECK(errs.size() >= 4);
  CHECK(mentions(errs, "c:"));
  CHECK(mentions(errs, "colour: unknown key"));
  CHECK(mentions(errs, "numerics.N"));
  CHECK(mentions(errs, "tol"));
  CHECK(mentions(errors_of({{"name", "x"}, {"task", "paint"}}), "task"));
  CHECK(mentions(errors_of({{"task", "spectrum"}}), "name"));
}

TEST_CASE("defaults are filled in") {
  const Scenario sc = validate_scenario({{"name", "spec"}, {"task", "spectrum"}, {"system", {{"kind", "smooth"}, {"a", 1.0}, {"b", 7.38}}}});
  CHECK(sc.output() == fs::path("out/spec"));
  CHECK(sc.doc["numerics"]["N"] == 200);
  CHECK(sc.doc["system"]["n"] == 200);
  CHECK(sc.doc["system"]["k"] == 2.0);
  CHECK(sc.doc["count"] == 5);
  // Validation is idempotent.
  CHECK(validate_scenario(sc.doc).doc == sc.doc);
}

TEST_CASE("spectrum run and manifest replay") {
  const fs::path dir = scratch("spectrum");
  const Scenario sc = validate_scenario({{"name", "spec"}, {"task", "spectrum"}, {"system", {{"kind", "limit"}, {"c", 1.0}, {"d", 7.38}}}});
  const RunResult r = run_scenario(sc, dir);
  CHECK(r.resolved);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "summary.json"));
  const nlohmann::json m = read_json(dir / "manifest.json");
  CHECK(m["ddelab_version"] == kVersion);
  CHECK(m["scenario"] == sc.doc);
  for (const auto& a : m["artifacts"])
    CHECK(hex64(fnv1a(read_text(dir / a["file"].get<std::string>()))) == a["fnv1a"]);
  CHECK(spectrum_table(r.report).find("lambda") != std::string::npos);

  const fs::path again = scratch("spectrum-replay");
  run_scenario(load_scenario(dir / "manifest.json"), again);
  CHECK(data_files(dir) == data_files(again));
}

TEST_CASE("figure x1 preset") {
  const fs::path dir = scratch("x1");
  const RunResult r = run_scenario(validate_scenario(preset_scenario("x1")), dir);
  CHECK(r.resolved);
  for (const char* f : {"diagram.json", "plus.csv", "minus.csv", "stationary.csv", "figure.svg", "manifest.json"})
    CHECK(fs::exists(dir / f));
  const nlohmann::json g = read_json(dir / "diagram.json");
  CHECK(g["plus"]["limit"] == "PERIODIC");
  CHECK(g["minus"]["limit"] == "ZERO");
  const CsvTable plus = parse_csv(read_text(dir / "plus.csv"));
  CHECK(plus.column("x_delayed") >= 0);
  const std::string svg = read_text(dir / "figure.svg");
  CHECK(svg.find("x(t-1)") != std::string::npos);
  CHECK(svg.find(role_color(SeriesRole::Plus)) != std::string::npos);
  CHECK(svg.find(role_color(SeriesRole::Minus)) != std::string::npos);
  CHECK(svg.find(role_color(SeriesRole::Stationary)) != std::string::npos);

  const fs::path again = scratch("x1-replay");
  run_scenario(load_scenario(dir / "manifest.json"), again);
  CHECK(data_files(dir) == data_files(again));
}

TEST_CASE("figure x3 preset uses the Hopf parameters") {
  const fs::path dir = scratch("x3");
  nlohmann::json raw = preset_scenario("x3");
  raw["cells"] = 0;
  const RunResult r = run_scenario(validate_scenario(raw), dir);
  const nlohmann::json g = read_json(dir / "diagram.json");
  CHECK(g["c"].get<double>() == doctest::Approx(5.0 * std::numbers::pi / (3.0 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(g["d"].get<double>() == doctest::Approx(7.95));
  CHECK(g.contains("hopf"));
  CHECK(fs::exists(dir / "figure.svg"));
  (void)r;
}

TEST_CASE("unknown preset") { CHECK_THROWS_AS(preset_scenario("x9"), ValidationError); }

TEST_CASE("svg of a constant series is a horizontal line") {
  Series s{"flat", SeriesRole::Stationary, {0.0, 1.0, 2.0, 3.0}, {0.4, 0.4, 0.4, 0.4}, {}};
  const std::string svg = render_svg({s});
  const std::regex poly("points=\"([^\"]*)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, poly));
  std::set<std::string> ys;
  const std::string pts = m[1];
  const std::regex pair("([-0-9.]+),([-0-9.]+)");
  for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pair); it != std::sregex_iterator(); ++it)
    ys.insert((*it)[2]);
  CHECK(ys.size() == 1);
  CHECK(svg.find("x(t-1)") == std::string::npos);
  CHECK(svg == render_svg({s}));
}

TEST_CASE("svg errors") {
  CHECK_THROWS_AS(render_svg({}), std::invalid_argument);
  Series empty{"none", SeriesRole::Other, {}, {}, {}};
  CHECK_THROWS_AS(render_svg({empty}), std::invalid_argument);
  Series skew{"skew", SeriesRole::Other, {0.0, 1.0}, {1.0}, {}};
  CHECK_THROWS_AS(render_svg({skew}), std::invalid_argument);
}

TEST_CASE("csv round trip") {
  const std::string text = csv_columns({"t", "x"}, {{0.0, 0.5}, {1.0, 0.25}});
  const CsvTable t = parse_csv(text);
  CHECK(t.column("x") == 1);
  CHECK(t.column("y") == -1);
  CHECK(t.cols[1][1] == 0.25);
  CHECK(format_number(0.1) == "0.10000000000000001");
  const Series s = series_from_csv(t, "x", SeriesRole::Plus);
  CHECK(s.x.size() == 2);
}

}
