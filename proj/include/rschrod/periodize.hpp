#pragma once

#include "rschrod/base.hpp"
#include "rschrod/geometry.hpp"
#include "rschrod/kernel.hpp"

// Truncation-controlled periodization of the regularized kernel over the
// four flat geometries, including the termwise derivative series. Sums run
// in a fixed deterministic order (parallel distance ascending, lexicographic
// ties) with compensated accumulation, so results are bit-reproducible.

namespace rschrod {

struct TruncationPolicy {
  double abs_tol = 1e-10;
  double max_radius = 1e4;
  // When set, every sum is re-evaluated at twice the chosen radius and the
  // two values must agree to abs_tol.
  bool validated = false;
};

// Radius R such that the modulus tail of the (possibly differentiated)
// kernel sum beyond parallel distance R is below policy.abs_tol, uniformly
// in the sum's center. The tail estimate counts lattice points by Voronoi
// volume inside spherical shells; derivative series pass their polynomial
// envelope through `poly` so the bound absorbs the growth into a halved
// Gaussian rate.
struct PolyEnvelope {
  std::vector<KernelDerivative::MonomialBound> monomials{{1.0, 0}};
};

double truncation_radius(const RegKernelParams& params, double t,
                         const TruncationPolicy& policy, const Lattice& lattice,
                         const PolyEnvelope& poly = {},
                         bool interleaved_pair = false);

// Truncated value of the derivative series
//   sum_m chi(m) * flip(m)^{alpha_n} * (d^alpha e_eps)(T_m(x) - y, t)
// where T_m is the deck-transformation family of the manifold kind. y = 0
// gives the fundamental solutions as printed; general y gives the two-point
// Green kernel used by evolution by convolution.
Complex periodized_eval(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                        const RegKernelParams& params, const TruncationPolicy& policy,
                        const MultiIndex& alpha);

Complex torus_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                     const RegKernelParams& params, const TruncationPolicy& policy);
Complex cylinder_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                        const RegKernelParams& params, const TruncationPolicy& policy);
Complex moebius_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                       const RegKernelParams& params, const TruncationPolicy& policy);
Complex klein_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                     const RegKernelParams& params, const TruncationPolicy& policy);

Complex torus_kernel_derivative(const VecX& x, double t, const ManifoldSpec& spec,
                                const RegKernelParams& params,
                                const TruncationPolicy& policy, const MultiIndex& alpha);

// Derivative series on any of the four kinds (|alpha| <= 4). This is the
// derivative OF the periodized kernel: termwise chain rule, so flipped terms
// carry the flip sign to the power alpha_n.
Complex periodized_derivative(const ManifoldSpec& spec, const VecX& x, double t,
                              const RegKernelParams& params, const TruncationPolicy& policy,
                              const MultiIndex& alpha);

// Periodization OF the derivative kernel d^alpha e_eps: the same translated
// and flipped arguments but no chain factor. On tori the two coincide; on
// the non-orientable quotients they differ for odd alpha_n (the scalar
// kernel's evenness makes this the antisymmetric combination where
// periodized_derivative stays the symmetric one).
Complex periodized_derivative_kernel(const ManifoldSpec& spec, const VecX& x, double t,
                                     const RegKernelParams& params,
                                     const TruncationPolicy& policy, const MultiIndex& alpha);

// Two-point Green kernel K(x, y) = sum_m chi(m) e_eps(T_m(x) - y, t).
Complex periodized_green(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                         const RegKernelParams& params, const TruncationPolicy& policy);

}  // namespace rschrod
