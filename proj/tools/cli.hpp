#pragma once

// The bouquet command-line front end. run_cli() is the whole program; main()
// only forwards to it so the tests can drive commands in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bouquet/diagnostics.hpp"
#include "bouquet/potential.hpp"

namespace bouquet::cli {

enum Exit : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Invalid configuration (exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  double lambda = 0.25;
  /// Potential as JSON; validated per command (the summability command also
  /// accepts inadmissible exponents).
  nlohmann::json spec = {{"t", 2.0}, {"tau", 1.0}, {"c_law", {{"kind", "gaussian"}, {"beta", 2.0}}}};
  int n_level = 1;
  int depth = 4;
  std::uint64_t seed = 1;
  double backward_tolerance = 1e-10;
  double eigen_tolerance = 1e-13;
  std::filesystem::path output_dir = ".";

  int m_max = 0;  // 0: use depth
  int n_max = 8;
  std::vector<double> radii{5.0, 10.0, 20.0};
  int count = 10;
  int hair_depth = 20;
  std::size_t samples = 1000;
  int sum_n_max = 50;

  bool strict = false;
  MetricKind metric = MetricKind::Induced;
  bool broken_constants = false;

  PotentialSpec potential(bool require_admissible = true) const;
};

/// Reads a JSON config; unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

/// Parses "unit", "gaussian", "gaussian:BETA" or "table:c0,c1,..." (gaussian(2) tail).
nlohmann::json parse_c_law(const std::string& text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bouquet::cli
