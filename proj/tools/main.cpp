// Command-line front end: kernel tables, periodized-kernel evaluation,
// initial-value solving, verification suites and the eps -> 0 pairing study.
// Exit codes: 0 success, 1 computation failure, 2 usage or config error.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rschrod/io.hpp"
#include "rschrod/kernel.hpp"
#include "rschrod/periodize.hpp"
#include "rschrod/semigroup.hpp"
#include "rschrod/verify.hpp"

namespace {

using namespace rschrod;

VecX parse_vector(const std::string& text, int expected) {
  std::vector<double> vals;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    vals.push_back(std::stod(cell, &used));
    if (used != cell.size()) throw ConfigError("bad number in vector: '" + cell + "'");
  }
  if (expected > 0 && static_cast<int>(vals.size()) != expected)
    throw ConfigError("expected " + std::to_string(expected) + " comma-separated values");
  return Eigen::Map<VecX>(vals.data(), static_cast<int>(vals.size()));
}

MatX parse_basis_rows(const std::string& text) {
  std::vector<VecX> rows;
  std::istringstream in(text);
  std::string row;
  while (std::getline(in, row, ';')) rows.push_back(parse_vector(row, -1));
  if (rows.empty()) throw ConfigError("empty basis");
  MatX out(static_cast<int>(rows.size()), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != out.cols()) throw ConfigError("ragged basis rows");
    out.row(static_cast<int>(r)) = rows[r];
  }
  return out;
}

std::string format_complex(Complex z) {
  return format_g17(z.real()) + " " + format_g17(z.imag());
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string manifold = "torus";
  std::string basis;
  std::string spin;
  std::string x;
  std::string method;
  std::string times;
  std::string p_values;
  int n = 0;
  int grid = 0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  double t = std::numeric_limits<double>::quiet_NaN();
  double tol = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig merge_config(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) cfg = parse_run_config(read_file(flags.config_path));
  if (flags.n > 0) {
    cfg.n = flags.n;
    if (flags.basis.empty() && flags.config_path.empty())
      cfg.basis = MatX::Identity(cfg.n, cfg.n);
  }
  if (!flags.manifold.empty()) {
    if (flags.manifold == "torus") cfg.manifold = ManifoldKind::Torus;
    else if (flags.manifold == "cylinder") cfg.manifold = ManifoldKind::Cylinder;
    else if (flags.manifold == "moebius") cfg.manifold = ManifoldKind::Moebius;
    else if (flags.manifold == "klein") cfg.manifold = ManifoldKind::Klein;
    else throw ConfigError("unknown manifold '" + flags.manifold + "'");
  }
  if (!flags.basis.empty()) cfg.basis = parse_basis_rows(flags.basis);
  if (!flags.spin.empty()) {
    cfg.spin.clear();
    std::istringstream in(flags.spin);
    std::string cell;
    while (std::getline(in, cell, ',')) cfg.spin.push_back(std::stoi(cell));
  }
  if (!std::isnan(flags.eps)) cfg.epsilon = flags.eps;
  if (flags.tol > 0.0) cfg.tolerance = flags.tol;
  if (flags.grid > 0) cfg.grid = flags.grid;
  if (!flags.method.empty()) cfg.method = flags.method;
  if (!flags.times.empty()) {
    cfg.times.clear();
    const VecX ts = parse_vector(flags.times, -1);
    for (int i = 0; i < ts.size(); ++i) cfg.times.push_back(ts[i]);
  }
  if (!flags.p_values.empty()) {
    cfg.p_values.clear();
    const VecX ps = parse_vector(flags.p_values, -1);
    for (int i = 0; i < ps.size(); ++i) cfg.p_values.push_back(ps[i]);
  }
  if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
  if (flags.seed_set) cfg.seed = flags.seed;
  return cfg;
}

int cmd_kernel(const CommonFlags& flags) {
  const int n = flags.n > 0 ? flags.n : 1;
  const VecX x = flags.x.empty() ? VecX::Zero(n) : parse_vector(flags.x, n);
  if (std::isnan(flags.t)) throw ConfigError("kernel: --t is required");
  const double eps = std::isnan(flags.eps) ? 1.0 : flags.eps;
  const Complex value = (eps == 0.0)
                            ? eval_limit(x, flags.t, n)
                            : eval_regularized(x, flags.t, make_params(eps, n));
  std::cout << format_complex(value) << "\n";
  return 0;
}

int cmd_periodize(const CommonFlags& flags, const std::string& alpha_text) {
  RunConfig cfg = merge_config(flags);
  const ManifoldSpec spec = cfg.manifold_spec();
  TruncationPolicy policy;
  policy.abs_tol = cfg.tolerance;

  MultiIndex alpha = MultiIndex::Zero(cfg.n);
  if (!alpha_text.empty()) {
    const VecX a = parse_vector(alpha_text, cfg.n);
    for (int i = 0; i < cfg.n; ++i) alpha[i] = static_cast<int>(a[i]);
  }

  const double t = flags.t;
  if (std::isnan(t)) throw ConfigError("periodize: --t is required");

  if (flags.grid > 0 && !cfg.out_path.empty()) {
    // kernel table over the fundamental domain
    GridFunction table;
    if (spec.rank() == spec.ambient_dim()) {
      table = make_grid(spec, cfg.grid, [&](const VecX& p) {
        return periodized_eval(spec, p, VecX::Zero(cfg.n), t, make_params(cfg.epsilon, cfg.n),
                               policy, alpha);
      });
    } else {
      table = make_grid(spec, cfg.grid, cfg.trans_grid, cfg.trans_extent, [&](const VecX& p) {
        return periodized_eval(spec, p, VecX::Zero(cfg.n), t, make_params(cfg.epsilon, cfg.n),
                               policy, alpha);
      });
    }
    std::string out = grid_csv_header(cfg.n);
    append_grid_csv(out, table, t);
    write_file(cfg.out_path, out);
    return 0;
  }

  const VecX x = flags.x.empty() ? VecX::Zero(cfg.n) : parse_vector(flags.x, cfg.n);
  const Complex value = periodized_eval(spec, x, VecX::Zero(cfg.n), t,
                                        make_params(cfg.epsilon, cfg.n), policy, alpha);
  std::cout << format_complex(value) << "\n";
  return 0;
}

int cmd_solve(const CommonFlags& flags) {
  RunConfig cfg = merge_config(flags);
  const ManifoldSpec spec = cfg.manifold_spec();
  const RegKernelParams params = make_params(cfg.epsilon, cfg.n);
  TruncationPolicy policy;
  policy.abs_tol = cfg.tolerance;

  std::vector<InitialMode> modes = cfg.initial_modes;
  if (modes.empty()) modes.push_back({VecXi::Zero(cfg.n), Complex(1.0, 0.0)});

  // Initial data from explicit modes of the section's eigenbasis; an extra
  // Gaussian factor confines the transverse directions when the manifold
  // has them.
  const Lattice& lat = spec.lattice;
  auto sampler = [&](const VecX& p) {
    const VecX coords = lat.dual_basis().transpose() * p;
    Complex acc(0.0, 0.0);
    for (const InitialMode& m : modes) {
      double phase = 0.0;
      for (int a = 0; a < lat.rank(); ++a) {
        const double shift = spec.spin.contains(a + 1) ? 0.5 : 0.0;
        phase += (m.k[a] + shift) * coords[a];
      }
      acc += m.coefficient * std::exp(Complex(0.0, 2.0 * kPi * phase));
    }
    if (lat.rank() < cfg.n) {
      const VecX par = lat.dual_basis() * (lat.basis().transpose() * p);
      acc *= std::exp(-(p - par).squaredNorm());
    }
    return acc;
  };

  GridFunction u0 = spec.rank() == spec.ambient_dim()
                        ? make_grid(spec, cfg.grid, sampler)
                        : make_grid(spec, cfg.grid, cfg.trans_grid, cfg.trans_extent, sampler);

  std::string out = grid_csv_header(cfg.n);
  if (cfg.times.empty()) {
    append_grid_csv(out, u0, 0.0);
  } else {
    for (double t : cfg.times) {
      GridFunction v = (cfg.method == "spectral") ? apply_spectral(u0, t, params)
                                                  : apply_convolution(u0, t, params, policy);
      append_grid_csv(out, v, t);
    }
  }
  if (cfg.out_path.empty()) {
    std::cout << out;
  } else {
    write_file(cfg.out_path, out);
  }
  return 0;
}

int cmd_verify(const CommonFlags& flags, const std::string& suite) {
  RunConfig cfg = merge_config(flags);
  const std::vector<std::string> suites = suite.empty() ? std::vector<std::string>{}
                                                        : std::vector<std::string>{suite};
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.canonical())));
  const VerifyReport report = run_verification(suites, cfg.seed, hash);
  const std::string json = report_to_json(report);
  if (cfg.out_path.empty()) {
    std::cout << json;
  } else {
    write_file(cfg.out_path, json);
  }
  for (const VerifyCase& c : report.cases)
    std::fprintf(stderr, "[%s] %s :: %s (measured %.3e, tolerance %.3e)\n",
                 c.pass ? "pass" : "FAIL", c.suite.c_str(), c.name.c_str(), c.measured,
                 c.tolerance);
  return report.pass ? 0 : 1;
}

int cmd_limit(const CommonFlags& flags, int kmax, double t0, double t1) {
  RunConfig cfg = merge_config(flags);
  const ManifoldSpec spec = cfg.manifold_spec();
  TruncationPolicy policy;
  policy.abs_tol = cfg.tolerance;

  std::vector<double> eps;
  for (int k = 1; k <= kmax; ++k) eps.push_back(std::pow(2.0, -k));

  auto bump = [](double s) {
    const double u = std::abs(s);
    return u >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - u * u));
  };
  auto phi = [&](const VecX& x, double t) {
    double v = bump((t - 0.5 * (t0 + t1)) / (0.5 * (t1 - t0)));
    for (int a = 0; a < x.size(); ++a) v *= bump((x[a] - 0.5) / 0.35);
    return v;
  };

  const WeakLimitResult res = weak_limit_pairings(phi, spec, eps, t0, t1, 256, 64, policy);
  std::string out = "eps,re,im,abs_diff_prev\n";
  for (std::size_t i = 0; i < res.pairings.size(); ++i) {
    out += format_g17(eps[i]) + "," + format_g17(res.pairings[i].real()) + "," +
           format_g17(res.pairings[i].imag()) + ",";
    out += (i == 0 ? std::string("") : format_g17(res.differences[i - 1]));
    out += "\n";
  }
  if (cfg.out_path.empty()) {
    std::cout << out;
  } else {
    write_file(cfg.out_path, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularized Schroedinger kernels on flat manifolds"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string alpha_text, suite = "all";
  int kmax = 8;
  double t0 = 0.05, t1 = 0.35;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", flags.n, "space dimension");
    cmd->add_option("--eps", flags.eps, "regularization parameter (0 selects the limit kernel)");
    cmd->add_option("--t", flags.t, "time");
    cmd->add_option("--x", flags.x, "point, comma-separated");
    cmd->add_option("--manifold", flags.manifold, "torus|cylinder|moebius|klein");
    cmd->add_option("--basis", flags.basis, "lattice basis rows, ';'-separated");
    cmd->add_option("--spin", flags.spin, "spin/pin generator indices, comma-separated");
    cmd->add_option("--tol", flags.tol, "truncation tolerance");
    cmd->add_option("--grid", flags.grid, "grid resolution");
    cmd->add_option("--times", flags.times, "time list, comma-separated");
    cmd->add_option("--p", flags.p_values, "L_p exponents, comma-separated");
    cmd->add_option("--method", flags.method, "spectral|kernel");
    cmd->add_option("--config", flags.config_path, "JSON config path");
    cmd->add_option("--out", flags.out_path, "output path");
    cmd->add_option("--seed", flags.seed, "RNG seed")->each([&](const std::string&) {
      flags.seed_set = true;
    });
  };

  CLI::App* kernel = app.add_subcommand("kernel", "evaluate the fundamental solution");
  add_common(kernel);
  CLI::App* periodize = app.add_subcommand("periodize", "evaluate a periodized kernel");
  add_common(periodize);
  periodize->add_option("--alpha", alpha_text, "derivative multi-index, comma-separated");
  CLI::App* solve = app.add_subcommand("solve", "evolve initial data");
  add_common(solve);
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify);
  verify->add_option("--suite", suite, "suite name or 'all'");
  CLI::App* limit = app.add_subcommand("limit", "eps -> 0 pairing study");
  add_common(limit);
  limit->add_option("--kmax", kmax, "number of eps halvings");
  limit->add_option("--t0", t0, "pairing window start");
  limit->add_option("--t1", t1, "pairing window end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (kernel->parsed()) return cmd_kernel(flags);
    if (periodize->parsed()) return cmd_periodize(flags, alpha_text);
    if (solve->parsed()) return cmd_solve(flags);
    if (verify->parsed()) return cmd_verify(flags, suite);
    if (limit->parsed()) return cmd_limit(flags, kmax, t0, t1);
  } catch (const rschrod::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
