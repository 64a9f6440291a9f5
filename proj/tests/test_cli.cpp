#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "bouquet/io.hpp"
#include "cli.hpp"

using namespace bouquet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bouquet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bouquet_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("endpoint command") {
  const auto r = run({"endpoint", "|0"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("re=2.15329236") != std::string::npos);
  CHECK(run({"endpoint", "3,1"}).code == cli::kUsage);
  CHECK(run({"--strict", "endpoint", "3|0"}).code == cli::kUsage);
  CHECK(run({"--lambda", "0.5", "endpoint", "|0"}).code == cli::kUsage);
}

TEST_CASE("pressure command for the zero potential") {
  const auto dir = scratch("pressure0");
  const auto r = run({"--out", dir.string(), "--constant", "0", "--m", "3", "pressure"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = read_csv(dir / "pressure.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows[0] == std::vector<std::string>{"route", "N", "m_or_n", "value", "residual", "envelope"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][3]) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("pressure command aborts past the state cap") {
  const auto dir = scratch("pressure_cap");
  const auto r = run({"--out", dir.string(), "--N", "3", "--m", "2", "pressure"});
  CHECK(r.code == cli::kNumerical);
  CHECK(is_aborted(dir / "pressure.csv"));
}

TEST_CASE("inadmissible exponents are configuration errors") {
  CHECK(run({"--out", scratch("t0").string(), "--t", "0", "pressure"}).code == cli::kUsage);
  CHECK(run({"--c-law", "bogus", "pressure"}).code == cli::kUsage);
  CHECK(run({"--N", "0", "pressure"}).code == cli::kUsage);
  CHECK(run({"nonsense"}).code == cli::kUsage);
}

TEST_CASE("config files") {
  const auto dir = scratch("config");
  {
    std::ofstream(dir / "ok.json") << R"({"lambda": 0.25, "N": 1, "m": 2, "spec": {"constant": 0.5}, "n_max": 3})";
    std::ofstream(dir / "bad.json") << R"({"lambda": 0.25, "colour": "red"})";
  }
  const auto r = run({"--config", (dir / "ok.json").string(), "--out", dir.string(), "pressure"});
  CHECK(r.code == cli::kOk);
  const auto rows = read_csv(dir / "pressure.csv");
  CHECK(std::stod(rows[1][3]) == doctest::Approx(std::log(3.0) + 0.5));
  const auto bad = run({"--config", (dir / "bad.json").string(), "pressure"});
  CHECK(bad.code == cli::kUsage);
  CHECK(bad.err.find("colour") != std::string::npos);
  CHECK_THROWS_AS(cli::load_config(dir / "missing.json"), cli::ConfigError);
}

TEST_CASE("c-law text forms") {
  CHECK(cli::parse_c_law("unit") == nlohmann::json{{"kind", "unit"}});
  CHECK(cli::parse_c_law("gaussian:3")["beta"] == 3.0);
  CHECK(cli::parse_c_law("table:1,0.5")["values"].size() == 2);
  CHECK_THROWS_AS(cli::parse_c_law("table:1,x"), cli::ConfigError);
}

TEST_CASE("measure command is deterministic") {
  const auto a = scratch("measure_a");
  const auto b = scratch("measure_b");
  REQUIRE(run({"--out", a.string(), "--m", "4", "measure"}).code == cli::kOk);
  REQUIRE(run({"--out", b.string(), "--m", "4", "measure"}).code == cli::kOk);
  for (const char* f : {"measure.json", "gibbs.csv", "tightness.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  const auto doc = nlohmann::json::parse(slurp(a / "measure.json"));
  CHECK(doc["weights"].size() == 81);
  double mass = 0;
  for (double w : doc["weights"]) mass += w;
  CHECK(mass == doctest::Approx(1.0));
  CHECK(doc["conformality_residual"].get<double>() < 1e-10);
  CHECK(doc["invariance_residual"].get<double>() < 1e-10);
}

TEST_CASE("audit command") {
  const auto ok = scratch("audit_ok");
  const auto r = run({"--out", ok.string(), "audit"});
  CHECK(r.code == cli::kOk);
  const auto rows = read_csv(ok / "audit.csv");
  CHECK(rows[0] == std::vector<std::string>{"axiom", "N", "samples", "worst_violation", "verdict", "notes"});
  CHECK(rows.size() == 6);

  const auto broken = scratch("audit_broken");
  CHECK(run({"--out", broken.string(), "--inject-broken-constants", "audit"}).code == cli::kNumerical);
  CHECK(slurp(broken / "audit.csv").find("B1,1,") != std::string::npos);
  CHECK(slurp(broken / "audit.csv").find("FAIL") != std::string::npos);

  const auto natural = scratch("audit_natural");
  CHECK(run({"--out", natural.string(), "--metric", "natural", "audit"}).code == cli::kOk);
}

TEST_CASE("hairs command") {
  const auto dir = scratch("hairs");
  REQUIRE(run({"--out", dir.string(), "hairs", "--count", "4", "--depth", "5"}).code == cli::kOk);
  const auto rows = read_csv(dir / "hairs.csv");
  CHECK(rows[0] == std::vector<std::string>{"itinerary", "re", "im", "param_index"});
  CHECK(rows.size() == 1 + 4 * 5);
  CHECK(rows[1][0] == "|0");
  CHECK(rows[1][3] == "0");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(2.153292364110349649));
}

TEST_CASE("summability command") {
  const auto good = scratch("sum_good");
  CHECK(run({"--out", good.string(), "summability"}).code == cli::kOk);
  CHECK(fs::exists(good / "summability.csv"));
  CHECK(fs::exists(good / "rapid_decrease.csv"));
  const auto flat = scratch("sum_flat");
  CHECK(run({"--out", flat.string(), "--t", "0", "--c-law", "unit", "summability"}).code == cli::kNumerical);
}
