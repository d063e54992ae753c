#include "rschrod/periodize.hpp"

#include <algorithm>
#include <cmath>

namespace rschrod {

namespace {

// integral_a^inf s^j exp(-rho s^2) ds for a >= 0.
double gauss_moment_tail(int j, double rho, double a) {
  if (j == 0) return 0.5 * std::sqrt(kPi / rho) * std::erfc(std::sqrt(rho) * a);
  if (j == 1) return std::exp(-rho * a * a) / (2.0 * rho);
  return std::pow(a, j - 1) * std::exp(-rho * a * a) / (2.0 * rho) +
         (j - 1) / (2.0 * rho) * gauss_moment_tail(j - 2, rho, a);
}

double unit_sphere_area(int k) { return 2.0 * std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k); }

// Voronoi shell bound: sum over shifted lattice points at parallel distance
// > R of exp(-rho |.|^2), for a rank-k lattice with covolume `covol` and
// covering radius bound `mu`. Valid for any shift of the lattice.
double lattice_gaussian_tail(double rho, double R, int k, double mu, double covol) {
  const double a = std::max(0.0, R - 2.0 * mu);
  double integral = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k - 1; ++j) {
    if (j > 0) binom = binom * (k - j) / j;
    integral += binom * std::pow(mu, k - 1 - j) * gauss_moment_tail(j, rho, a);
  }
  return unit_sphere_area(k) / covol * integral;
}

// max over r >= 0 of r^d exp(-(rho/2) r^2).
double monomial_envelope(int d, double rho) {
  if (d == 0) return 1.0;
  return std::pow(d / rho, 0.5 * d) * std::exp(-0.5 * d);
}

struct Term {
  VecXi m;
  VecX d;
  double par_dist;
  double weight;  // character * flip chain sign
};

bool term_order(const Term& a, const Term& b) {
  if (a.par_dist != b.par_dist) return a.par_dist < b.par_dist;
  for (int i = 0; i < a.m.size(); ++i)
    if (a.m[i] != b.m[i]) return a.m[i] < b.m[i];
  return false;
}

// Displacement T_m(x) - y and the flip sign of the n-th coordinate.
void displacement(const ManifoldSpec& spec, const VecX& x, const VecX& y, const VecXi& m,
                  VecX& d, int& flip) {
  const int n = spec.ambient_dim();
  flip = 1;
  switch (spec.kind) {
    case ManifoldKind::Torus:
    case ManifoldKind::Cylinder:
      d = x - y + spec.lattice.vector(m);
      return;
    case ManifoldKind::Moebius: {
      flip = sgn_moebius(m);
      d = x - y + spec.lattice.vector(m);
      d[n - 1] = flip * x[n - 1] - y[n - 1];
      return;
    }
    case ManifoldKind::Klein: {
      const int mn = m[n - 1];
      flip = (mn % 2 == 0) ? 1 : -1;
      d = x - y;
      for (int j = 0; j + 1 < n; ++j) d += m[j] * spec.lattice.basis().col(j);
      d[n - 1] = flip * x[n - 1] + mn - y[n - 1];
      return;
    }
  }
}

Complex sum_with_radius(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                        const RegKernelParams& params, const MultiIndex& alpha,
                        double radius, bool chain_rule) {
  const int n = spec.ambient_dim();
  const int k = spec.rank();
  const Lattice& lat = spec.lattice;
  const int alpha_n = alpha[n - 1];

  const double reach = radius + x.norm() + y.norm();
  VecXi bound(k);
  for (int i = 0; i < k; ++i)
    bound[i] = static_cast<int>(std::ceil(reach * lat.dual_basis().col(i).norm()));

  const bool project = !lat.full_rank();
  std::vector<Term> terms;
  VecXi m(k);
  for (int i = 0; i < k; ++i) m[i] = -bound[i];
  VecX d(n);
  int flip = 1;
  while (true) {
    displacement(spec, x, y, m, d, flip);
    const double par =
        project ? (lat.dual_basis() * (lat.basis().transpose() * d)).norm() : d.norm();
    if (par <= radius) {
      double w = character(spec.spin, m);
      if (chain_rule && alpha_n % 2 != 0 && flip < 0) w = -w;
      terms.push_back({m, d, par, w});
    }
    int axis = k - 1;
    while (axis >= 0) {
      if (m[axis] < bound[axis]) {
        ++m[axis];
        break;
      }
      m[axis] = -bound[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  std::sort(terms.begin(), terms.end(), term_order);

  KahanSum acc;
  if (multi_index_order(alpha) == 0) {
    for (const Term& term : terms)
      acc.add(term.weight * eval_regularized(term.d, t, params));
  } else {
    const KernelDerivative deriv(params, t, alpha);
    for (const Term& term : terms) acc.add(term.weight * deriv(term.d));
  }
  const Complex value = acc.value();
  if (!is_finite(value)) throw OverflowError("periodized sum: non-finite result");
  return value;
}

}  // namespace

double truncation_radius(const RegKernelParams& params, double t,
                         const TruncationPolicy& policy, const Lattice& lattice,
                         const PolyEnvelope& poly, bool interleaved_pair) {
  if (!(t > 0.0)) throw std::invalid_argument("truncation_radius: t must be > 0");
  if (!(policy.abs_tol > 0.0))
    throw std::invalid_argument("truncation_radius: abs_tol must be > 0");

  const double rho = params.decay_rate(t);
  const int k = lattice.rank();
  // A Klein sum is a pair of interleaved translates of the doubled lattice,
  // not a single lattice orbit; account for that in the shell count.
  const double covol = interleaved_pair ? 2.0 * lattice.covolume() : lattice.covolume();
  const double mu = interleaved_pair ? lattice.covering_bound() + 0.5 : lattice.covering_bound();
  const double sheets = interleaved_pair ? 2.0 : 1.0;

  bool pure = poly.monomials.size() == 1 && poly.monomials[0].degree == 0;
  double amplitude = params.prefactor_magnitude(t);
  double rho_eff = rho;
  if (!pure) {
    // Absorb the derivative polynomial into constants times a half-rate
    // Gaussian.
    rho_eff = 0.5 * rho;
    double env = 0.0;
    for (const auto& mono : poly.monomials)
      env += mono.coeff_abs * monomial_envelope(mono.degree, rho);
    amplitude *= env;
  } else {
    amplitude *= poly.monomials[0].coeff_abs;
  }

  double radius = 2.0 * mu + 1.0 / std::sqrt(rho_eff);
  while (sheets * amplitude * lattice_gaussian_tail(rho_eff, radius, k, mu, covol) >
         policy.abs_tol) {
    radius *= 1.2;
    if (radius > policy.max_radius)
      throw TruncationError(
          "truncation_radius: required radius exceeds max_radius; increase eps*t or "
          "loosen abs_tol");
  }
  return radius;
}

namespace {

Complex periodized_eval_impl(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                             const RegKernelParams& params, const TruncationPolicy& policy,
                             const MultiIndex& alpha, bool chain_rule) {
  const int n = spec.ambient_dim();
  if (params.dim != n) throw std::invalid_argument("periodized_eval: params dimension mismatch");
  if (x.size() != n || y.size() != n)
    throw std::invalid_argument("periodized_eval: point dimension mismatch");
  if (alpha.size() != n)
    throw std::invalid_argument("periodized_eval: multi-index length mismatch");
  const int order = multi_index_order(alpha);
  if (order > 4)
    throw std::invalid_argument("periodized_eval: derivative order capped at 4");
  if (!(t > 0.0)) return Complex(0.0, 0.0);

  PolyEnvelope envelope;
  if (order > 0) envelope.monomials = KernelDerivative(params, t, alpha).monomial_bounds();
  const bool interleaved = spec.kind == ManifoldKind::Klein;
  const double radius =
      truncation_radius(params, t, policy, spec.lattice, envelope, interleaved);

  const Complex value = sum_with_radius(spec, x, y, t, params, alpha, radius, chain_rule);
  if (policy.validated) {
    const Complex doubled =
        sum_with_radius(spec, x, y, t, params, alpha, 2.0 * radius, chain_rule);
    if (std::abs(doubled - value) > policy.abs_tol)
      throw TruncationError("periodized_eval: doubling validation failed");
  }
  return value;
}

}  // namespace

Complex periodized_eval(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                        const RegKernelParams& params, const TruncationPolicy& policy,
                        const MultiIndex& alpha) {
  return periodized_eval_impl(spec, x, y, t, params, policy, alpha, true);
}

namespace {

Complex kind_checked(const ManifoldKind kind, const VecX& x, double t,
                     const ManifoldSpec& spec, const RegKernelParams& params,
                     const TruncationPolicy& policy) {
  if (spec.kind != kind) throw std::invalid_argument("periodized kernel: wrong manifold kind");
  return periodized_eval(spec, x, VecX::Zero(x.size()), t, params, policy,
                         MultiIndex::Zero(x.size()));
}

}  // namespace

Complex torus_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                     const RegKernelParams& params, const TruncationPolicy& policy) {
  return kind_checked(ManifoldKind::Torus, x, t, spec, params, policy);
}

Complex cylinder_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                        const RegKernelParams& params, const TruncationPolicy& policy) {
  return kind_checked(ManifoldKind::Cylinder, x, t, spec, params, policy);
}

Complex moebius_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                       const RegKernelParams& params, const TruncationPolicy& policy) {
  return kind_checked(ManifoldKind::Moebius, x, t, spec, params, policy);
}

Complex klein_kernel(const VecX& x, double t, const ManifoldSpec& spec,
                     const RegKernelParams& params, const TruncationPolicy& policy) {
  return kind_checked(ManifoldKind::Klein, x, t, spec, params, policy);
}

Complex torus_kernel_derivative(const VecX& x, double t, const ManifoldSpec& spec,
                                const RegKernelParams& params,
                                const TruncationPolicy& policy, const MultiIndex& alpha) {
  if (spec.kind != ManifoldKind::Torus)
    throw std::invalid_argument("torus_kernel_derivative: wrong manifold kind");
  return periodized_eval(spec, x, VecX::Zero(x.size()), t, params, policy, alpha);
}

Complex periodized_derivative(const ManifoldSpec& spec, const VecX& x, double t,
                              const RegKernelParams& params, const TruncationPolicy& policy,
                              const MultiIndex& alpha) {
  return periodized_eval(spec, x, VecX::Zero(x.size()), t, params, policy, alpha);
}

Complex periodized_derivative_kernel(const ManifoldSpec& spec, const VecX& x, double t,
                                     const RegKernelParams& params,
                                     const TruncationPolicy& policy, const MultiIndex& alpha) {
  return periodized_eval_impl(spec, x, VecX::Zero(x.size()), t, params, policy, alpha, false);
}

Complex periodized_green(const ManifoldSpec& spec, const VecX& x, const VecX& y, double t,
                         const RegKernelParams& params, const TruncationPolicy& policy) {
  return periodized_eval(spec, x, y, t, params, policy, MultiIndex::Zero(x.size()));
}

}  // namespace rschrod
