#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rschrod/base.hpp"
#include "rschrod/semigroup.hpp"

// Stable file surfaces: the CSV grid format (header x1,...,xn,t,re,im, one
// row per sample, %.17g decimals, LF line endings) and the JSON run config.
// %.17g round-trips binary64 exactly, so a grid written by `solve` re-reads
// to bitwise-identical samples.

namespace rschrod {

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::string format_g17(double value);
// strtod-based parse that accepts subnormals (std::stod raises on the ERANGE
// they set); throws ConfigError on malformed input.
double parse_double(const std::string& text);

std::string grid_csv_header(int dim);
// Appends the rows of `grid` at time stamp `t` to `out`.
void append_grid_csv(std::string& out, const GridFunction& grid, double t);

struct CsvRow {
  VecX x;
  double t;
  Complex value;
};

struct CsvGrid {
  int dim = 0;
  std::vector<CsvRow> rows;
};

CsvGrid parse_grid_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

struct InitialMode {
  VecXi k;
  Complex coefficient;
};

// One self-describing document per experiment. The lattice basis is stored
// as row vectors.
struct RunConfig {
  int n = 1;
  ManifoldKind manifold = ManifoldKind::Torus;
  MatX basis = MatX::Identity(1, 1);
  std::vector<int> spin;  // generator indices in S
  double epsilon = 1.0;
  double tolerance = 1e-12;
  int grid = 64;
  int trans_grid = 16;
  double trans_extent = 6.0;
  std::vector<double> p_values{1.6, 2.0, 2.9};
  std::vector<double> times{0.05, 0.5};
  std::vector<InitialMode> initial_modes;
  std::string method = "spectral";  // or "kernel"
  std::string out_path;
  std::uint64_t seed = 20260808;

  ManifoldSpec manifold_spec() const;
  std::string canonical() const;  // deterministic serialization, hashed into reports
};

RunConfig parse_run_config(const std::string& json_text);

}  // namespace rschrod
