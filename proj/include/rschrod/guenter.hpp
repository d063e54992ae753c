#pragma once

#include <functional>

#include "rschrod/base.hpp"

// Guenter tangential derivatives D_j = d_j - nu_j d_nu with nu(x) = x/|x|,
// evaluated through the ambient formulation, and the Guenter Laplacian
// sum_j D_j D_j. On the unit sphere the latter acts as the surface
// Laplacian: spherical harmonics of degree l are eigenfunctions with
// eigenvalue -l(l+n-2).

namespace rschrod {

struct AmbientFunction {
  int dim = 0;
  std::function<Complex(const VecX&)> value;
  // Optional analytic gradient; centered differences otherwise.
  std::function<VecXc(const VecX&)> gradient;
};

namespace detail {

inline VecXc ambient_gradient(const AmbientFunction& f, const VecX& x, double h) {
  if (f.gradient) return f.gradient(x);
  VecXc g(f.dim);
  for (int j = 0; j < f.dim; ++j) {
    VecX xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace detail

// D_j f(x) = d_j f - nu_j(x) d_nu f, j is 1-based.
inline Complex guenter_derivative(int j, const AmbientFunction& f, const VecX& x, double h) {
  if (j < 1 || j > f.dim) throw std::invalid_argument("guenter_derivative: index out of range");
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("guenter_derivative: nu(x) undefined at the origin");
  const VecXc grad = detail::ambient_gradient(f, x, h);
  const VecX nu = x / r;
  Complex radial(0.0, 0.0);
  for (int i = 0; i < f.dim; ++i) radial += nu[i] * grad[i];
  return grad[j - 1] - nu[j - 1] * radial;
}

// Lap_G f = sum_j D_j (D_j f), nested through second-order stencils. The
// value at x depends only on surface data on the sphere through x, so any
// ambient extension gives the same limit.
inline Complex guenter_laplacian(const AmbientFunction& f, const VecX& x, double h) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("guenter_laplacian: nu(x) undefined at the origin");
  Complex acc(0.0, 0.0);
  for (int j = 1; j <= f.dim; ++j) {
    AmbientFunction inner;
    inner.dim = f.dim;
    inner.value = [&f, j, h](const VecX& y) { return guenter_derivative(j, f, y, h); };
    acc += guenter_derivative(j, inner, x, h);
  }
  return acc;
}

}  // namespace rschrod
