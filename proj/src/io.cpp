#include "rschrod/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rschrod {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  if (text.empty()) throw ConfigError("empty number");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw ConfigError("bad number '" + text + "'");
  return v;
}

std::string grid_csv_header(int dim) {
  std::string h;
  for (int a = 1; a <= dim; ++a) {
    h += "x" + std::to_string(a);
    h += ",";
  }
  h += "t,re,im\n";
  return h;
}

void append_grid_csv(std::string& out, const GridFunction& grid, double t) {
  const std::int64_t total = grid.count();
  for (std::int64_t i = 0; i < total; ++i) {
    const VecX x = grid.point_flat(i);
    for (int a = 0; a < x.size(); ++a) {
      out += format_g17(x[a]);
      out += ",";
    }
    out += format_g17(t);
    out += ",";
    out += format_g17(grid.samples[i].real());
    out += ",";
    out += format_g17(grid.samples[i].imag());
    out += "\n";
  }
}

CsvGrid parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty file");
  int dim = 0;
  {
    std::istringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    if (cols.size() < 4 || cols[cols.size() - 3] != "t" || cols[cols.size() - 2] != "re" ||
        cols.back() != "im")
      throw ConfigError("csv: malformed header, expected x1,...,xn,t,re,im");
    dim = static_cast<int>(cols.size()) - 3;
  }
  CsvGrid grid;
  grid.dim = dim;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      try {
        vals.push_back(parse_double(cell));
      } catch (const ConfigError&) {
        throw ConfigError("csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != dim + 3)
      throw ConfigError("csv line " + std::to_string(lineno) + ": wrong column count");
    CsvRow r;
    r.x = Eigen::Map<VecX>(vals.data(), dim);
    r.t = vals[dim];
    r.value = Complex(vals[dim + 1], vals[dim + 2]);
    grid.rows.push_back(std::move(r));
  }
  return grid;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << contents;
}

ManifoldSpec RunConfig::manifold_spec() const {
  // Stored as row vectors; the Lattice wants columns.
  const MatX columns = basis.transpose();
  Lattice lat = Lattice::from_basis(columns);
  SpinStructure s;
  for (int i : spin) {
    if (i < 1 || i > lat.rank())
      throw ConfigError("field 'spin': generator index " + std::to_string(i) +
                        " outside 1.." + std::to_string(lat.rank()));
    s.members |= std::uint32_t{1} << (i - 1);
  }
  return make_manifold(manifold, lat, s);
}

std::string RunConfig::canonical() const {
  std::string s = "n=" + std::to_string(n) + ";manifold=" + to_string(manifold) + ";basis=";
  for (int r = 0; r < basis.rows(); ++r)
    for (int c = 0; c < basis.cols(); ++c) s += format_g17(basis(r, c)) + ",";
  s += ";spin=";
  for (int i : spin) s += std::to_string(i) + ",";
  s += ";eps=" + format_g17(epsilon) + ";tol=" + format_g17(tolerance);
  s += ";grid=" + std::to_string(grid) + ";tgrid=" + std::to_string(trans_grid);
  s += ";textent=" + format_g17(trans_extent) + ";p=";
  for (double p : p_values) s += format_g17(p) + ",";
  s += ";times=";
  for (double t : times) s += format_g17(t) + ",";
  s += ";modes=";
  for (const auto& m : initial_modes) {
    for (int a = 0; a < m.k.size(); ++a) s += std::to_string(m.k[a]) + " ";
    s += format_g17(m.coefficient.real()) + " " + format_g17(m.coefficient.imag()) + ",";
  }
  s += ";method=" + method + ";seed=" + std::to_string(seed);
  return s;
}

namespace {

using nlohmann::json;

ManifoldKind parse_kind(const std::string& s) {
  if (s == "torus") return ManifoldKind::Torus;
  if (s == "cylinder") return ManifoldKind::Cylinder;
  if (s == "moebius") return ManifoldKind::Moebius;
  if (s == "klein") return ManifoldKind::Klein;
  throw ConfigError("field 'manifold': unknown kind '" + s +
                    "' (expected torus|cylinder|moebius|klein)");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig cfg;
  try {
    if (doc.contains("n")) cfg.n = doc.at("n").get<int>();
    if (cfg.n < 1) throw ConfigError("field 'n': must be >= 1");
    if (doc.contains("manifold")) cfg.manifold = parse_kind(doc.at("manifold").get<std::string>());
    if (doc.contains("basis")) {
      const auto& rows = doc.at("basis");
      if (!rows.is_array() || rows.empty())
        throw ConfigError("field 'basis': expected an array of row arrays");
      const int k = static_cast<int>(rows.size());
      const int width = static_cast<int>(rows[0].size());
      if (width != cfg.n) throw ConfigError("field 'basis': rows must have length n");
      cfg.basis = MatX(k, width);
      for (int r = 0; r < k; ++r) {
        if (static_cast<int>(rows[r].size()) != width)
          throw ConfigError("field 'basis': ragged rows");
        for (int c = 0; c < width; ++c) cfg.basis(r, c) = rows[r][c].get<double>();
      }
    } else {
      cfg.basis = MatX::Identity(cfg.n, cfg.n);
    }
    if (doc.contains("spin")) cfg.spin = doc.at("spin").get<std::vector<int>>();
    if (doc.contains("epsilon")) cfg.epsilon = doc.at("epsilon").get<double>();
    if (!(cfg.epsilon > 0.0)) throw ConfigError("field 'epsilon': must be > 0");
    if (doc.contains("tolerance")) cfg.tolerance = doc.at("tolerance").get<double>();
    if (!(cfg.tolerance > 0.0)) throw ConfigError("field 'tolerance': must be > 0");
    if (doc.contains("grid")) cfg.grid = doc.at("grid").get<int>();
    if (cfg.grid < 2) throw ConfigError("field 'grid': must be >= 2");
    if (doc.contains("trans_grid")) cfg.trans_grid = doc.at("trans_grid").get<int>();
    if (doc.contains("trans_extent")) cfg.trans_extent = doc.at("trans_extent").get<double>();
    if (doc.contains("p")) cfg.p_values = doc.at("p").get<std::vector<double>>();
    for (double p : cfg.p_values)
      if (!(p >= 1.0)) throw ConfigError("field 'p': entries must be >= 1");
    if (doc.contains("times")) cfg.times = doc.at("times").get<std::vector<double>>();
    if (doc.contains("initial_modes")) {
      for (const auto& entry : doc.at("initial_modes")) {
        InitialMode mode;
        const auto kvec = entry.at("k").get<std::vector<int>>();
        if (static_cast<int>(kvec.size()) != cfg.n)
          throw ConfigError("field 'initial_modes': mode index length must be n");
        mode.k = Eigen::Map<const VecXi>(kvec.data(), cfg.n);
        mode.coefficient = Complex(entry.value("re", 0.0), entry.value("im", 0.0));
        cfg.initial_modes.push_back(std::move(mode));
      }
    }
    if (doc.contains("method")) {
      cfg.method = doc.at("method").get<std::string>();
      if (cfg.method != "spectral" && cfg.method != "kernel")
        throw ConfigError("field 'method': expected spectral|kernel");
    }
    if (doc.contains("out")) cfg.out_path = doc.at("out").get<std::string>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace rschrod
