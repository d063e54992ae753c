#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rschrod/semigroup.hpp"

using namespace rschrod;

namespace {

ManifoldSpec unit_torus(int n, SpinStructure spin = SpinStructure::trivial()) {
  return make_manifold(ManifoldKind::Torus, Lattice::from_basis(MatX::Identity(n, n)), spin);
}

GridFunction mode_grid(const ManifoldSpec& spec, int N, const VecXi& k) {
  GridFunction u;
  u.spec = spec;
  u.res = N;
  u.samples = VecXc::Zero(u.count());
  const int n = spec.ambient_dim();
  for (std::int64_t flat = 0; flat < u.samples.size(); ++flat) {
    const VecXi j = u.decode(flat);
    double phase = 0.0;
    for (int a = 0; a < n; ++a) {
      const double shift = spec.spin.contains(a + 1) ? 0.5 : 0.0;
      phase += (k[a] + shift) * j[a] / static_cast<double>(N);
    }
    u.samples[flat] = std::exp(Complex(0.0, 2.0 * kPi * phase));
  }
  return u;
}

}  // namespace

TEST_CASE("make_grid") {
  const auto spec = unit_torus(2);
  const auto ones = make_grid(spec, 8, [](const VecX&) { return Complex(1.0, 0.0); });
  for (std::int64_t i = 0; i < ones.samples.size(); ++i)
    CHECK(ones.samples[i] == Complex(1.0, 0.0));
  CHECK(ones.weight() == doctest::Approx(1.0 / 64.0));

  // sampling a single Fourier mode hits the exact grid values
  const auto mode = make_grid(spec, 8, [](const VecX& x) {
    return std::exp(Complex(0.0, 2.0 * kPi * x[0]));
  });
  const auto direct = mode_grid(spec, 8, (VecXi(2) << 1, 0).finished());
  for (std::int64_t i = 0; i < mode.samples.size(); ++i)
    CHECK(std::abs(mode.samples[i] - direct.samples[i]) < 1e-14);

  // reading back at grid nodes reproduces the sampler exactly
  auto f = [](const VecX& x) { return Complex(x[0] * x[0] + 0.5, x[1]); };
  const auto grid = make_grid(spec, 6, f);
  for (std::int64_t i = 0; i < grid.count(); ++i)
    CHECK(grid.samples[i] == f(grid.point_flat(i)));

  // weights sum to the domain volume, also with a transverse box
  CHECK(grid.weight() * grid.count() == doctest::Approx(1.0).epsilon(1e-14));
  MatX cb(2, 1);
  cb << 0.8, 0.0;
  const auto cyl = make_manifold(ManifoldKind::Cylinder, Lattice::from_basis(cb),
                                 SpinStructure::trivial());
  const auto cg = make_grid(cyl, 4, 6, 5.0, [](const VecX&) { return Complex(1.0, 0.0); });
  CHECK(cg.weight() * cg.count() == doctest::Approx(0.8 * 5.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_grid(spec, 1, f), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      make_grid(spec, 4,
                [](const VecX& x) {
                  return x[0] == 0.0 && x[1] == 0.0
                             ? Complex(std::numeric_limits<double>::quiet_NaN(), 0.0)
                             : Complex(1.0, 0.0);
                }),
      "make_grid: non-finite sample at point (0, 0)", std::invalid_argument);
}

TEST_CASE("lp norms") {
  const auto spec = unit_torus(1);
  const auto ones = make_grid(spec, 16, [](const VecX&) { return Complex(1.0, 0.0); });
  for (double p : {1.0, 1.6, 2.0, 2.9}) CHECK(lp_norm(ones, p) == doctest::Approx(1.0));

  std::mt19937_64 rng(61);
  const auto u = make_grid(spec, 16, [&](const VecX&) {
    return Complex(oracles::uniform(rng, -1.0, 1.0), oracles::uniform(rng, -1.0, 1.0));
  });
  GridFunction scaled = u;
  scaled.samples *= Complex(0.0, -2.5);
  CHECK(lp_norm(scaled, 1.7) == doctest::Approx(2.5 * lp_norm(u, 1.7)).epsilon(1e-12));

  // direct-summation oracle
  const double p = 2.3;
  double acc = 0.0;
  for (std::int64_t i = 0; i < u.samples.size(); ++i)
    acc += std::pow(std::abs(u.samples[i]), p) / 16.0;
  CHECK(lp_norm(u, p) == doctest::Approx(std::pow(acc, 1.0 / p)).epsilon(1e-13));

  CHECK_THROWS_AS(lp_norm(u, 0.5), std::invalid_argument);
}

TEST_CASE("spectral evolution on eigenfunctions") {
  const auto params = make_params(1.0, 1);
  const auto spec = unit_torus(1);

  // constants are fixed by the evolution
  const auto c = make_grid(spec, 16, [](const VecX&) { return Complex(0.7, -0.2); });
  const auto ct = apply_spectral(c, 0.7, params);
  for (std::int64_t i = 0; i < ct.samples.size(); ++i)
    CHECK(std::abs(ct.samples[i] - c.samples[i]) < 1e-13);

  // u0 = exp(2 pi i x): output is exp(-4 pi^2 t (eps - i)) u0
  const auto mode = mode_grid(spec, 32, VecXi::Constant(1, 1));
  const double t = 0.12;
  const Complex factor = std::exp(-4.0 * kPi * kPi * t * Complex(1.0, -1.0));
  const auto evolved = apply_spectral(mode, t, params);
  for (std::int64_t i = 0; i < evolved.samples.size(); ++i)
    CHECK(std::abs(evolved.samples[i] - factor * mode.samples[i]) < 1e-12);

  // t = 0 is the identity, exactly
  const auto id = apply_spectral(mode, 0.0, params);
  for (std::int64_t i = 0; i < id.samples.size(); ++i)
    CHECK(id.samples[i] == mode.samples[i]);

  CHECK_THROWS_AS(apply_spectral(mode, -0.1, params), std::invalid_argument);

  // non-torus grids are rejected toward the convolution path
  MatX cb(2, 1);
  cb << 1.0, 0.0;
  const auto cyl = make_manifold(ManifoldKind::Cylinder, Lattice::from_basis(cb),
                                 SpinStructure::trivial());
  const auto cg = make_grid(cyl, 8, 8, 4.0, [](const VecX& x) {
    return Complex(std::exp(-x[1] * x[1]), 0.0);
  });
  CHECK_THROWS_AS(apply_spectral(cg, 0.1, make_params(1.0, 2)), std::invalid_argument);
}

TEST_CASE("spectral modes carry the spin offsets") {
  const auto spec = unit_torus(1, SpinStructure::from_indices({1}, 1));
  double min_lambda = 1e300;
  for (const auto& mode : spectral_modes(spec, 16)) {
    CHECK(mode.lambda >= 0.0);
    min_lambda = std::min(min_lambda, mode.lambda);
  }
  // antiperiodic sections have no zero mode; the bottom is (pi)^2 * ... = 4pi^2 (1/2)^2
  CHECK(min_lambda == doctest::Approx(kPi * kPi).epsilon(1e-12));
}

TEST_CASE("convolution path: linearity and spectral agreement") {
  const auto params = make_params(1.0, 1);
  const auto spec = unit_torus(1);
  TruncationPolicy policy;
  policy.abs_tol = 1e-12;

  std::mt19937_64 rng(67);
  const auto u = make_grid(spec, 32, [&](const VecX& x) {
    return Complex(std::cos(2.0 * kPi * x[0]), oracles::uniform(rng, -0.1, 0.1));
  });
  const auto v = make_grid(spec, 32, [&](const VecX& x) {
    return Complex(std::sin(4.0 * kPi * x[0]), 0.3);
  });
  const double t = 0.08;

  GridFunction combo = u;
  combo.samples = Complex(2.0, 1.0) * u.samples + Complex(-0.5, 0.25) * v.samples;
  const auto lhs = apply_convolution(combo, t, params, policy);
  const auto ua = apply_convolution(u, t, params, policy);
  const auto va = apply_convolution(v, t, params, policy);
  for (std::int64_t i = 0; i < lhs.samples.size(); ++i)
    CHECK(std::abs(lhs.samples[i] - Complex(2.0, 1.0) * ua.samples[i] -
                   Complex(-0.5, 0.25) * va.samples[i]) < 1e-12);

  // agreement with the spectral path on band-limited data
  const auto us = apply_spectral(u, t, params);
  for (std::int64_t i = 0; i < us.samples.size(); ++i)
    CHECK(std::abs(us.samples[i] - ua.samples[i]) < 1e-8);

  CHECK_THROWS_AS(apply_convolution(u, 0.0, params, policy), std::invalid_argument);
}

TEST_CASE("skew-lattice torus: spectral and convolution paths agree") {
  // A non-orthogonal basis exercises the dual-based frequencies and the
  // chi-twisted circular reduction together; the exact eigenmode anchors
  // both against the closed-form multiplier.
  MatX b(2, 2);
  b << 1.0, 0.3, 0.0, 0.8;
  const Lattice lat = Lattice::from_basis(b);
  const auto spec = make_manifold(ManifoldKind::Torus, lat, SpinStructure::trivial());
  const auto params = make_params(1.0, 2);
  TruncationPolicy policy;
  policy.abs_tol = 1e-12;
  const double t = 0.1;

  // exact eigenmode exp(2 pi i <w_1, x>) with lambda = 4 pi^2 |w_1|^2
  const VecX w1 = lat.dual_basis().col(0);
  const auto mode = make_grid(spec, 16, [&](const VecX& x) {
    return std::exp(Complex(0.0, 2.0 * kPi * w1.dot(x)));
  });
  const double lambda = 4.0 * kPi * kPi * w1.squaredNorm();
  const Complex factor = std::exp(-t * lambda * Complex(1.0, -1.0));

  const auto vs = apply_spectral(mode, t, params);
  for (std::int64_t i = 0; i < vs.samples.size(); ++i)
    CHECK(std::abs(vs.samples[i] - factor * mode.samples[i]) < 1e-12);

  const auto vc = apply_convolution(mode, t, params, policy);
  for (std::int64_t i = 0; i < vc.samples.size(); ++i)
    CHECK(std::abs(vc.samples[i] - vs.samples[i]) < 1e-8);

  // and on a band-limited mix with a nontrivial spin structure
  const auto anti = make_manifold(ManifoldKind::Torus, lat, SpinStructure::from_indices({2}, 2));
  const VecX w2 = lat.dual_basis().col(1);
  const auto section = make_grid(anti, 16, [&](const VecX& x) {
    return std::exp(Complex(0.0, 2.0 * kPi * (w1 + 0.5 * w2).dot(x))) +
           Complex(0.4, 0.1) * std::exp(Complex(0.0, 2.0 * kPi * (0.5 * w2 - w2).dot(x)));
  });
  const auto ss = apply_spectral(section, t, params);
  const auto sc = apply_convolution(section, t, params, policy);
  for (std::int64_t i = 0; i < ss.samples.size(); ++i)
    CHECK(std::abs(ss.samples[i] - sc.samples[i]) < 1e-8);
}

TEST_CASE("moebius evolution matches the cylinder for scalar data") {
  // The scalar Green kernels coincide, so the evolutions must too.
  const auto params = make_params(1.0, 2);
  TruncationPolicy policy;
  policy.abs_tol = 1e-10;
  MatX b(2, 1);
  b << 1.0, 0.0;
  const auto moebius =
      make_manifold(ManifoldKind::Moebius, Lattice::from_basis(b), SpinStructure::trivial());
  const auto cylinder =
      make_manifold(ManifoldKind::Cylinder, Lattice::from_basis(b), SpinStructure::trivial());
  auto sampler = [](const VecX& x) {
    return Complex(std::cos(2.0 * kPi * x[0]) * std::exp(-x[1] * x[1]), 0.0);
  };
  const auto um = make_grid(moebius, 10, 12, 6.0, sampler);
  const auto uc = make_grid(cylinder, 10, 12, 6.0, sampler);
  const auto vm = apply_convolution(um, 0.05, params, policy);
  const auto vc = apply_convolution(uc, 0.05, params, policy);
  for (std::int64_t i = 0; i < vm.samples.size(); ++i)
    CHECK(std::abs(vm.samples[i] - vc.samples[i]) < 1e-12);
}

TEST_CASE("klein evolution: exact on sections, twist visible, data recovered") {
  const auto params = make_params(1.0, 2);
  TruncationPolicy policy;
  policy.abs_tol = 1e-10;
  MatX b(2, 2);
  b << 0.9, 0.0, 0.0, 1.0;
  const auto klein =
      make_manifold(ManifoldKind::Klein, Lattice::from_basis(b), SpinStructure::trivial());

  const int N = 12;
  // trivial-pin section (invariant under x_n -> 1 - x_n mod 2) built from
  // four plane waves sharing one eigenvalue, so its exact evolution is a
  // single multiplier.
  auto sampler = [](const VecX& x) {
    return Complex(std::cos(2.0 * kPi * x[0] / 0.9) * std::cos(2.0 * kPi * x[1]), 0.0);
  };
  const double lambda = 4.0 * kPi * kPi * (1.0 / (0.9 * 0.9) + 1.0);
  const auto u0 = make_grid(klein, N, sampler);

  const double t = 0.005;
  const Complex mult = std::exp(-t * lambda * Complex(1.0, -1.0));
  const auto v = apply_convolution(u0, t, params, policy);
  double dev = 0.0, sup = 0.0;
  for (std::int64_t i = 0; i < v.samples.size(); ++i) {
    dev = std::max(dev, std::abs(v.samples[i] - mult * u0.samples[i]));
    sup = std::max(sup, std::abs(v.samples[i] - u0.samples[i]));
  }
  CHECK(dev < 1e-6);

  // small-t recovery
  CHECK(sup < 0.7);
  const auto v2 = apply_convolution(u0, 0.0005, params, policy);
  double sup2 = 0.0;
  for (std::int64_t i = 0; i < v2.samples.size(); ++i)
    sup2 = std::max(sup2, std::abs(v2.samples[i] - u0.samples[i]));
  CHECK(sup2 < sup);

  // non-section data is projected by the twisted kernel, so the result
  // departs from the plain torus multiplier action
  auto skew = [](const VecX& x) {
    return Complex(std::cos(2.0 * kPi * (x[1] - 0.25)), 0.0);
  };
  const auto w0 = make_grid(klein, N, skew);
  const auto wk = apply_convolution(w0, 0.02, params, policy);
  const Complex mult2 = std::exp(-0.02 * 4.0 * kPi * kPi * Complex(1.0, -1.0));
  double twist = 0.0;
  for (std::int64_t i = 0; i < wk.samples.size(); ++i)
    twist = std::max(twist, std::abs(wk.samples[i] - mult2 * w0.samples[i]));
  CHECK(twist > 1e-2);
}

TEST_CASE("dissipativity pairing") {
  TestField zero;
  zero.value = [](const VecX&) { return Complex(0.0, 0.0); };
  zero.laplacian = [](const VecX&) { return Complex(0.0, 0.0); };
  CHECK(dissipativity_pairing(zero, 2, 6.0, 64, 2.0) == 0.0);

  // real Gaussian at p = 2: the pairing is -int |grad u|^2 = -pi in 2d
  TestField gauss;
  gauss.value = [](const VecX& x) { return Complex(std::exp(-x.squaredNorm()), 0.0); };
  gauss.laplacian = [](const VecX& x) {
    return Complex((4.0 * x.squaredNorm() - 4.0) * std::exp(-x.squaredNorm()), 0.0);
  };
  CHECK(dissipativity_pairing(gauss, 2, 8.0, 200, 2.0) ==
        doctest::Approx(-kPi).epsilon(1e-10));
  CHECK(dissipativity_pairing(gauss, 2, 8.0, 160, 2.5) <= 1e-10);

  CHECK_THROWS_AS(dissipativity_pairing(gauss, 2, 8.0, 64, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dissipativity_pairing(gauss, 2, 8.0, 64, 3.0), std::invalid_argument);
}

TEST_CASE("weak limit pairings") {
  const auto spec = unit_torus(1);
  TruncationPolicy policy;
  policy.abs_tol = 1e-10;
  const std::vector<double> eps{0.5, 0.25, 0.125};

  auto zero = [](const VecX&, double) { return 0.0; };
  const auto rz = weak_limit_pairings(zero, spec, eps, 0.05, 0.35, 24, 16, policy);
  for (const Complex& v : rz.pairings) CHECK(std::abs(v) == 0.0);

  auto bump = [](double s) {
    const double u = std::abs(s);
    return u >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - u * u));
  };
  auto phi = [&](const VecX& x, double t) {
    return bump((x[0] - 0.5) / 0.3) * bump((t - 0.2) / 0.12);
  };
  auto phi2 = [&](const VecX& x, double t) { return 2.0 * phi(x, t); };
  const auto r1 = weak_limit_pairings(phi, spec, eps, 0.05, 0.35, 24, 16, policy);
  const auto r2 = weak_limit_pairings(phi2, spec, eps, 0.05, 0.35, 24, 16, policy);
  for (std::size_t i = 0; i < eps.size(); ++i)
    CHECK(std::abs(r2.pairings[i] - 2.0 * r1.pairings[i]) < 1e-13);

  const std::vector<double> increasing{0.25, 0.5};
  CHECK_THROWS_AS(weak_limit_pairings(phi, spec, increasing, 0.05, 0.35, 8, 8, policy),
                  std::invalid_argument);
}

TEST_CASE("a corrupted multiplier breaks contraction") {
  const auto spec = unit_torus(1);
  std::mt19937_64 rng(71);
  const auto u0 = make_grid(spec, 32, [&](const VecX& x) {
    return Complex(std::cos(4.0 * kPi * x[0]) + 0.3, oracles::uniform(rng, -0.2, 0.2));
  });
  const double eps = 1.0, t = 1e-3;
  // sign-flipped eps: |multiplier| = exp(+eps lambda t) > 1 on nonzero modes
  const auto corrupted = apply_spectral_symbol(u0, [&](double lambda) {
    return std::exp(-t * lambda * Complex(-eps, -1.0));
  });
  CHECK(lp_norm(corrupted, 2.0) > lp_norm(u0, 2.0) * (1.0 + 1e-6));
}
