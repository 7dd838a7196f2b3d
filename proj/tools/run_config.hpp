#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stark/determinant.hpp"
#include "stark/potential.hpp"
#include "stark/roots.hpp"

namespace stark::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tol = 1e-12;
  int max_iter = 40;
  std::optional<int> r;  // regime start; AsymptoticConstants decides when absent
};

struct TaskConfig {
  std::string command;
  Family family = Family::plus;
  int n_lo = 10, n_hi = 60;
  ResonanceMode mode = ResonanceMode::born;
  bool multiplicity = true;
  // model-roots
  double b = 0.5;
  cplx z_star = 0.0;
  std::optional<Perturbation> g;
  bool brute_force = true;
  // scan-sector
  double phi_lo = 2.0 * pi / 3.0 + 0.1, phi_hi = pi;
  double r_lo = 30.0, r_hi = 120.0;
  int n_phi = 6, n_r = 8;
  // condition-c
  double k_min = 10.0, k_max = 1000.0;
  int k_count = 24;
  std::vector<double> k_args{0.1, pi / 2.0, pi - 0.1};
  // count
  double count_r_min = 50.0, count_r_max = 200.0, count_r_step = 10.0;
};

struct OutputConfig {
  std::string dir = "stark_out";
  std::string prefix;  // defaults to the command name
};

struct RunConfig {
  Potential potential = Potential::power_law(1.0, 0.75, 1.0);
  std::optional<GridSpec> grid;
  SolverConfig solver;
  TaskConfig task;
  OutputConfig output;
  unsigned threads = 0;  // 0: STARK_THREADS or hardware
  std::uint64_t seed = 0;

  /// Checks every field against its module's domain; throws ConfigError
  /// whose message starts with the field path.
  void validate() const;
};

/// Parses a configuration document on top of defaults. Unknown keys are
/// rejected so typos do not pass silently.
RunConfig parse_config(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
nlohmann::json to_json(const RunConfig& c);

/// "a..b" with integer ends.
std::pair<int, int> parse_int_range(const std::string& s, const std::string& field);
std::pair<double, double> parse_real_range(const std::string& s, const std::string& field);
/// "1", "1+2i", "-0.5-1i", "2i".
cplx parse_complex(const std::string& s, const std::string& field);

}  // namespace stark::cli
