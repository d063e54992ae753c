#pragma once

#include <functional>
#include <vector>

#include "rschrod/base.hpp"
#include "rschrod/geometry.hpp"
#include "rschrod/kernel.hpp"
#include "rschrod/periodize.hpp"

// Grid functions on the flat quotients and the evolution Gamma_t, realized
// two independent ways: a spectral multiplier exp(-t lambda / kappa) on the
// torus eigenbasis exp(2 pi i <k* + delta_S, x>), and normalized convolution
// against the periodized kernel. The spin offset delta_S = (1/2) sum_{i in S} w_i
// is forced by the (anti-)periodicity conditions.

namespace rschrod {

struct GridFunction {
  ManifoldSpec spec;
  int res = 0;                   // points per lattice direction
  int trans_res = 0;             // points per transverse direction (rank < n)
  double trans_extent = 0.0;     // transverse box is [-extent/2, extent/2]
  MatX trans_basis;              // n x (n-k), orthonormal, spans the complement
  VecXc samples;

  int ambient_dim() const { return spec.ambient_dim(); }
  int rank() const { return spec.rank(); }
  std::vector<int> axis_sizes() const;
  std::int64_t count() const;
  double weight() const;  // uniform quadrature weight, sums to the domain volume

  std::int64_t index(const VecXi& j) const;
  VecXi decode(std::int64_t flat) const;
  VecX point(const VecXi& j) const;
  VecX point_flat(std::int64_t flat) const { return point(decode(flat)); }
};

// Samples `sampler` at the grid nodes: lattice coordinates j/N along the
// periodic directions, midpoint nodes across the transverse box otherwise.
GridFunction make_grid(const ManifoldSpec& spec, int resolution,
                       const std::function<Complex(const VecX&)>& sampler);
GridFunction make_grid(const ManifoldSpec& spec, int resolution, int trans_resolution,
                       double trans_extent,
                       const std::function<Complex(const VecX&)>& sampler);

// Scalar-function norms; the Clifford 2^n factor is deliberately omitted
// here (it rescales all norms uniformly and cancels in every inequality).
double lp_norm(const GridFunction& u, double p);
double sup_norm(const GridFunction& u);

struct SpectralMode {
  VecXi index;    // integer frequencies, centered band
  VecX frequency; // k* + delta_S in ambient coordinates
  double lambda;  // 4 pi^2 |k* + delta_S|^2
};

std::vector<SpectralMode> spectral_modes(const ManifoldSpec& spec, int resolution);

// Generic spectral filter u -> F^{-1} diag(symbol(lambda)) F u on a torus
// grid. apply_spectral is symbol = exp(-t lambda / kappa); the spectral
// Laplacian is symbol = -lambda.
GridFunction apply_spectral_symbol(const GridFunction& u,
                                   const std::function<Complex(double)>& symbol);

GridFunction apply_spectral(const GridFunction& u0, double t, const RegKernelParams& params);

// Evolution by quadrature against the periodized two-point kernel, divided
// by the mass constant. Every grid samples a true fundamental domain once
// (Klein grids shift the flip coordinate to [1/2, 3/2), see
// GridFunction::point), so no sheet factor appears.
GridFunction apply_convolution(const GridFunction& u0, double t,
                               const RegKernelParams& params, const TruncationPolicy& policy);

// Dissipativity pairing Re < |u|^{p-2} u, Lap u > over a flat open box,
// with the Laplacian supplied analytically; <= 0 for 1 < p < 3. For real u
// this equals -(p-1) integral |u|^{p-2} |grad u|^2.
struct TestField {
  std::function<Complex(const VecX&)> value;
  std::function<Complex(const VecX&)> laplacian;
};

double dissipativity_pairing(const TestField& u, int dim, double half_extent,
                             int resolution, double p);

// Pairings <P_eps, phi> = integral of the periodized kernel against a
// space-time test function, for a strictly decreasing eps sequence, plus
// the successive differences |I_{k+1} - I_k|.
struct WeakLimitResult {
  std::vector<Complex> pairings;
  std::vector<double> differences;
};

WeakLimitResult weak_limit_pairings(const std::function<double(const VecX&, double)>& phi,
                                    const ManifoldSpec& spec,
                                    const std::vector<double>& eps_sequence, double t_lo,
                                    double t_hi, int space_res, int time_res,
                                    const TruncationPolicy& policy);

}  // namespace rschrod
