#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hcat/halfspace.hpp"
#include "hcat/prescribed.hpp"

namespace hcat {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct RunConfig {
  std::string subcommand;
  std::string h_spec;
  std::string f_spec;
  double r0 = 1.0;
  std::vector<double> r_list;
  std::optional<double> x_max;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::string branch = "both";
  std::optional<std::pair<double, double>> window;
  std::string out;  // empty: standard output
  std::string format = "json";
  int rings = 32;
  int segments = 48;
  unsigned threads = 0;  // sweep workers; 0 = available cores
};

/// powerlaw:alpha=<a> | expr:<expression in y> | table:<path> | scale:<factor>:<spec>.
/// Throws ParseError (with byte position in `spec`) for malformed specs.
PrescribedFunction parse_prescription(std::string_view spec);

/// sphere:<expression in x1, x2, x3> or any 1-D spec, taken as axisymmetric.
SphereFunction parse_sphere(std::string_view spec);

/// Executes one subcommand; artifacts go to cfg.out (or `out`), diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (flags and optional --config TOML file) and runs.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hcat
