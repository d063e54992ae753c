#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <random>

#include "oracles.hpp"
#include "rschrod/io.hpp"
#include "rschrod/verify.hpp"

using namespace rschrod;

TEST_CASE("g17 rendering round-trips binary64") {
  std::mt19937_64 rng(73);
  std::vector<double> probes{0.0, -0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 1e-308, 1e308,
                             -2.2250738585072014e-308, kPi};
  for (int i = 0; i < 200; ++i) {
    const double mant = oracles::uniform(rng, -1.0, 1.0);
    const int expo = static_cast<int>(oracles::uniform(rng, -300.0, 300.0));
    probes.push_back(std::ldexp(mant, expo));
  }
  probes.push_back(5e-324);  // smallest subnormal
  for (double v : probes) {
    const double back = parse_double(format_g17(v));
    CHECK(std::memcmp(&back, &v, sizeof(double)) == 0);
  }
}

TEST_CASE("csv grid round trip is bitwise") {
  const auto spec = make_manifold(ManifoldKind::Torus,
                                  Lattice::from_basis(MatX::Identity(2, 2)),
                                  SpinStructure::trivial());
  std::mt19937_64 rng(79);
  GridFunction grid;
  grid.spec = spec;
  grid.res = 5;
  grid.samples = VecXc::Zero(25);
  for (int i = 0; i < 25; ++i)
    grid.samples[i] = Complex(oracles::uniform(rng, -1.0, 1.0) * 1e3,
                              oracles::uniform(rng, -1.0, 1.0) * 1e-7);

  std::string text = grid_csv_header(2);
  append_grid_csv(text, grid, 0.125);
  const CsvGrid parsed = parse_grid_csv(text);
  REQUIRE(parsed.dim == 2);
  REQUIRE(parsed.rows.size() == 25);
  for (int i = 0; i < 25; ++i) {
    const Complex a = parsed.rows[i].value, b = grid.samples[i];
    CHECK(std::memcmp(&a, &b, sizeof(Complex)) == 0);
    CHECK(parsed.rows[i].t == 0.125);
    const VecX p = grid.point_flat(i);
    CHECK(parsed.rows[i].x[0] == p[0]);
    CHECK(parsed.rows[i].x[1] == p[1]);
  }

  CHECK_THROWS_AS(parse_grid_csv("bogus,header\n"), ConfigError);
  CHECK_THROWS_AS(parse_grid_csv("x1,t,re,im\n0.5,0.1,zero,0\n"), ConfigError);
  CHECK_THROWS_AS(parse_grid_csv("x1,t,re,im\n0.5,0.1,0\n"), ConfigError);
}

TEST_CASE("run config parsing") {
  const RunConfig defaults = parse_run_config("{}");
  CHECK(defaults.n == 1);
  CHECK(defaults.manifold == ManifoldKind::Torus);
  CHECK(defaults.epsilon == 1.0);

  const std::string text = R"({
    "n": 2,
    "manifold": "klein",
    "basis": [[0.9, 0.0], [0.0, 1.0]],
    "spin": [1],
    "epsilon": 0.5,
    "tolerance": 1e-11,
    "grid": 24,
    "p": [1.6, 2.0],
    "times": [0.05],
    "initial_modes": [{"k": [1, 0], "re": 0.25, "im": -1.0}],
    "method": "kernel",
    "seed": 99
  })";
  const RunConfig cfg = parse_run_config(text);
  CHECK(cfg.n == 2);
  CHECK(cfg.manifold == ManifoldKind::Klein);
  CHECK(cfg.basis(0, 0) == 0.9);
  CHECK(cfg.spin == std::vector<int>{1});
  CHECK(cfg.epsilon == 0.5);
  CHECK(cfg.grid == 24);
  CHECK(cfg.initial_modes.size() == 1);
  CHECK(cfg.initial_modes[0].coefficient == Complex(0.25, -1.0));
  CHECK(cfg.seed == 99);
  const ManifoldSpec spec = cfg.manifold_spec();
  CHECK(spec.kind == ManifoldKind::Klein);
  CHECK(spec.lattice.basis()(0, 0) == 0.9);  // rows transpose to columns

  CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"manifold": "sphere"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"epsilon": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"n": 2, "basis": [[1.0]]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"method": "magic"})"), ConfigError);
  const RunConfig bad_spin = parse_run_config(R"({"spin": [3]})");
  CHECK_THROWS_AS(bad_spin.manifold_spec(), ConfigError);
}

TEST_CASE("run_verification surface") {
  const VerifyReport empty = run_verification({}, 1, "0x0");
  CHECK(empty.pass);
  CHECK(empty.cases.empty());

  CHECK_THROWS_AS(run_verification({"nonsense"}, 1, "0x0"), std::invalid_argument);

  const VerifyReport one = run_verification({"clifford"}, 20260808, "0xabc");
  CHECK(one.pass);
  CHECK(one.cases.size() >= 3);

  const std::string json = report_to_json(one);
  const auto doc = nlohmann::json::parse(json);
  CHECK(doc.at("pass").get<bool>());
  CHECK(doc.at("seed").get<std::uint64_t>() == 20260808);
  CHECK(doc.at("config_hash").get<std::string>() == "0xabc");
  for (const auto& entry : doc.at("cases")) {
    CHECK(entry.contains("suite"));
    CHECK(entry.contains("case"));
    CHECK(entry.contains("measured"));
    CHECK(entry.contains("tolerance"));
    CHECK(entry.contains("pass"));
  }

  // identical inputs give byte-identical reports
  CHECK(report_to_json(run_verification({"clifford"}, 20260808, "0xabc")) == json);
}

TEST_CASE("criterion runner bounds") {
  CHECK_THROWS_AS(criterion_cases(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(criterion_cases(13, 1), std::invalid_argument);
  const auto cases = criterion_cases(11, 20260808);
  CHECK(cases.size() == 4);
  for (const auto& c : cases) CHECK(c.pass);
}
