#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rschrod/guenter.hpp"

using namespace rschrod;

namespace {

VecX random_unit(std::mt19937_64& rng, int n) {
  VecX x(n);
  for (int i = 0; i < n; ++i) x[i] = oracles::uniform(rng, -1.0, 1.0);
  if (x.norm() < 1e-3) x[0] = 1.0;
  return x.normalized();
}

}  // namespace

TEST_CASE("tangential derivatives kill radial functions") {
  AmbientFunction f;
  f.dim = 3;
  f.value = [](const VecX& x) { return Complex(x.squaredNorm(), 0.0); };
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX x = 1.3 * random_unit(rng, 3);
    for (int j = 1; j <= 3; ++j)
      CHECK(std::abs(guenter_derivative(j, f, x, 1e-4)) < 1e-9);
  }
}

TEST_CASE("first derivative of x1 on the unit sphere") {
  AmbientFunction f;
  f.dim = 3;
  f.value = [](const VecX& x) { return Complex(x[0], 0.0); };
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX x = random_unit(rng, 3);
    // D_1 x_1 = 1 - x_1^2 at |x| = 1
    CHECK(std::abs(guenter_derivative(1, f, x, 1e-4) - Complex(1.0 - x[0] * x[0], 0.0)) <
          1e-8);
  }
}

TEST_CASE("analytic gradient path matches finite differences at O(h^2)") {
  AmbientFunction fd_only, with_grad;
  fd_only.dim = with_grad.dim = 3;
  auto value = [](const VecX& x) {
    return Complex(std::exp(0.3 * x[0]) * std::sin(x[1] - 0.4 * x[2]), 0.0);
  };
  fd_only.value = with_grad.value = value;
  with_grad.gradient = [](const VecX& x) {
    VecXc g(3);
    const double e = std::exp(0.3 * x[0]);
    g[0] = Complex(0.3 * e * std::sin(x[1] - 0.4 * x[2]), 0.0);
    g[1] = Complex(e * std::cos(x[1] - 0.4 * x[2]), 0.0);
    g[2] = Complex(-0.4 * e * std::cos(x[1] - 0.4 * x[2]), 0.0);
    return g;
  };
  std::mt19937_64 rng(97);
  const VecX x = random_unit(rng, 3);
  const Complex exact = guenter_derivative(2, with_grad, x, 0.0);
  const double e1 = std::abs(guenter_derivative(2, fd_only, x, 2e-3) - exact);
  const double e2 = std::abs(guenter_derivative(2, fd_only, x, 1e-3) - exact);
  CHECK(e2 < 1e-6);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("guenter laplacian sphere eigenvalues") {
  AmbientFunction y1, y2, radial;
  y1.dim = y2.dim = radial.dim = 3;
  y1.value = [](const VecX& x) { return Complex(x[0], 0.0); };
  y2.value = [](const VecX& x) { return Complex(x[0] * x[1], 0.0); };
  radial.value = [](const VecX& x) { return Complex(std::exp(-x.squaredNorm()), 0.0); };

  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX x = random_unit(rng, 3);
    CHECK(std::abs(guenter_laplacian(y1, x, 1e-3) + 2.0 * Complex(x[0], 0.0)) < 1e-4);
    CHECK(std::abs(guenter_laplacian(y2, x, 1e-3) + 6.0 * Complex(x[0] * x[1], 0.0)) < 1e-4);
    // radial data is annihilated at every radius
    const VecX y = 0.8 * x;
    CHECK(std::abs(guenter_laplacian(radial, y, 1e-3)) < 1e-6);
  }
}

TEST_CASE("linearity") {
  AmbientFunction f, g, combo;
  f.dim = g.dim = combo.dim = 3;
  f.value = [](const VecX& x) { return Complex(x[0] * x[1], 0.0); };
  g.value = [](const VecX& x) { return Complex(std::sin(x[2]), 0.0); };
  combo.value = [&](const VecX& x) {
    return Complex(2.0, 1.0) * f.value(x) + Complex(-0.5, 0.0) * g.value(x);
  };
  std::mt19937_64 rng(103);
  const VecX x = random_unit(rng, 3);
  const Complex expect = Complex(2.0, 1.0) * guenter_laplacian(f, x, 1e-3) +
                         Complex(-0.5, 0.0) * guenter_laplacian(g, x, 1e-3);
  CHECK(std::abs(guenter_laplacian(combo, x, 1e-3) - expect) < 1e-7);
}

TEST_CASE("origin is rejected") {
  AmbientFunction f;
  f.dim = 2;
  f.value = [](const VecX& x) { return Complex(x[0], 0.0); };
  CHECK_THROWS_AS(guenter_derivative(1, f, VecX::Zero(2), 1e-3), std::domain_error);
  CHECK_THROWS_AS(guenter_laplacian(f, VecX::Zero(2), 1e-3), std::domain_error);
  CHECK_THROWS_AS(guenter_derivative(3, f, VecX::Ones(2), 1e-3), std::invalid_argument);
}
