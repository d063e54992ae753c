#include "rschrod/semigroup.hpp"

#include <Eigen/QR>
#include <cmath>
#include <sstream>

namespace rschrod {

std::vector<int> GridFunction::axis_sizes() const {
  std::vector<int> sizes;
  const int n = ambient_dim();
  const int k = rank();
  for (int a = 0; a < k; ++a) sizes.push_back(res);
  for (int a = k; a < n; ++a) sizes.push_back(trans_res);
  return sizes;
}

std::int64_t GridFunction::count() const {
  std::int64_t c = 1;
  for (int s : axis_sizes()) c *= s;
  return c;
}

double GridFunction::weight() const {
  const int n = ambient_dim();
  const int k = rank();
  double w = spec.lattice.covolume() / std::pow(static_cast<double>(res), k);
  if (k < n) w *= std::pow(trans_extent / trans_res, n - k);
  return w;
}

std::int64_t GridFunction::index(const VecXi& j) const {
  const auto sizes = axis_sizes();
  std::int64_t flat = 0;
  for (std::size_t a = 0; a < sizes.size(); ++a) flat = flat * sizes[a] + j[a];
  return flat;
}

VecXi GridFunction::decode(std::int64_t flat) const {
  const auto sizes = axis_sizes();
  VecXi j(static_cast<int>(sizes.size()));
  for (int a = static_cast<int>(sizes.size()) - 1; a >= 0; --a) {
    j[a] = static_cast<int>(flat % sizes[a]);
    flat /= sizes[a];
  }
  return j;
}

VecX GridFunction::point(const VecXi& j) const {
  const int n = ambient_dim();
  const int k = rank();
  VecX coords(k);
  for (int a = 0; a < k; ++a) coords[a] = static_cast<double>(j[a]) / res;
  // The printed Klein identification reflects about x_n = 1/2 and 3/2: its
  // quotient is represented once by the shifted segment [1/2, 3/2) in the
  // flip coordinate, not by [0, 1). Midpoint nodes keep clear of the mirror
  // planes.
  if (spec.kind == ManifoldKind::Klein)
    coords[k - 1] = 0.5 + (static_cast<double>(j[k - 1]) + 0.5) / res;
  VecX x = spec.lattice.basis() * coords;
  for (int a = k; a < n; ++a) {
    const double node = -0.5 * trans_extent + (j[a] + 0.5) * trans_extent / trans_res;
    x += node * trans_basis.col(a - k);
  }
  return x;
}

namespace {

// Orthonormal basis of the orthogonal complement of the lattice span. For
// lattices supported on the first k coordinates (Moebius, axis-aligned
// cylinders) this keeps the remaining axes verbatim, so the distinguished
// x_n coordinate stays meaningful.
MatX complement_basis(const Lattice& lattice) {
  const int n = lattice.ambient_dim();
  const int k = lattice.rank();
  bool axis_aligned = true;
  for (int j = 0; j < k && axis_aligned; ++j)
    for (int r = k; r < n && axis_aligned; ++r)
      if (std::abs(lattice.basis()(r, j)) > 1e-12) axis_aligned = false;
  MatX out(n, n - k);
  if (axis_aligned) {
    out.setZero();
    for (int a = 0; a < n - k; ++a) out(k + a, a) = 1.0;
    return out;
  }
  Eigen::HouseholderQR<MatX> qr(lattice.basis());
  MatX q = qr.householderQ();
  return q.rightCols(n - k);
}

GridFunction fill_grid(GridFunction grid, const std::function<Complex(const VecX&)>& sampler) {
  const std::int64_t total = grid.count();
  grid.samples.resize(total);
  for (std::int64_t i = 0; i < total; ++i) {
    const VecX x = grid.point_flat(i);
    const Complex v = sampler(x);
    if (!is_finite(v)) {
      std::ostringstream msg;
      msg << "make_grid: non-finite sample at point (";
      for (int a = 0; a < x.size(); ++a) msg << (a ? ", " : "") << x[a];
      msg << ")";
      throw std::invalid_argument(msg.str());
    }
    grid.samples[i] = v;
  }
  return grid;
}

}  // namespace

GridFunction make_grid(const ManifoldSpec& spec, int resolution,
                       const std::function<Complex(const VecX&)>& sampler) {
  if (resolution < 2) throw std::invalid_argument("make_grid: resolution must be >= 2");
  if (spec.rank() != spec.ambient_dim())
    throw std::invalid_argument("make_grid: rank < n needs a transverse box");
  GridFunction grid;
  grid.spec = spec;
  grid.res = resolution;
  return fill_grid(std::move(grid), sampler);
}

GridFunction make_grid(const ManifoldSpec& spec, int resolution, int trans_resolution,
                       double trans_extent,
                       const std::function<Complex(const VecX&)>& sampler) {
  if (resolution < 2) throw std::invalid_argument("make_grid: resolution must be >= 2");
  if (spec.rank() == spec.ambient_dim())
    throw std::invalid_argument("make_grid: full-rank manifolds take no transverse box");
  if (trans_resolution < 2 || !(trans_extent > 0.0))
    throw std::invalid_argument("make_grid: invalid transverse box");
  GridFunction grid;
  grid.spec = spec;
  grid.res = resolution;
  grid.trans_res = trans_resolution;
  grid.trans_extent = trans_extent;
  grid.trans_basis = complement_basis(spec.lattice);
  return fill_grid(std::move(grid), sampler);
}

double lp_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double w = u.weight();
  double acc = 0.0;
  for (std::int64_t i = 0; i < u.samples.size(); ++i)
    acc += w * std::pow(std::abs(u.samples[i]), p);
  return std::pow(acc, 1.0 / p);
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (std::int64_t i = 0; i < u.samples.size(); ++i)
    m = std::max(m, std::abs(u.samples[i]));
  return m;
}

std::vector<SpectralMode> spectral_modes(const ManifoldSpec& spec, int resolution) {
  if (spec.kind != ManifoldKind::Torus)
    throw std::invalid_argument("spectral_modes: defined on tori only");
  const int n = spec.ambient_dim();
  const int lo = -(resolution / 2);
  std::int64_t total = 1;
  for (int a = 0; a < n; ++a) total *= resolution;

  std::vector<SpectralMode> modes;
  modes.reserve(total);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    VecXi idx(n);
    std::int64_t rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % resolution) + lo;
      rem /= resolution;
    }
    VecX freq = VecX::Zero(n);
    for (int a = 0; a < n; ++a) {
      const double shift = spec.spin.contains(a + 1) ? 0.5 : 0.0;
      freq += (idx[a] + shift) * spec.lattice.dual_basis().col(a);
    }
    const double lambda = 4.0 * kPi * kPi * freq.squaredNorm();
    modes.push_back({idx, freq, lambda});
  }
  return modes;
}

namespace {

// Apply an N x N matrix along one axis of the flat row-major sample array.
void apply_along_axis(VecXc& data, const std::vector<int>& sizes, int axis,
                      const MatXc& matrix) {
  const int n_axes = static_cast<int>(sizes.size());
  const int N = sizes[axis];
  std::int64_t inner = 1;
  for (int a = axis + 1; a < n_axes; ++a) inner *= sizes[a];
  std::int64_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= sizes[a];

  VecXc slice(N);
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t i = 0; i < inner; ++i) {
      const std::int64_t base = o * N * inner + i;
      for (int r = 0; r < N; ++r) slice[r] = data[base + r * inner];
      VecXc out = matrix * slice;
      for (int r = 0; r < N; ++r) data[base + r * inner] = out[r];
    }
}

}  // namespace

GridFunction apply_spectral_symbol(const GridFunction& u,
                                   const std::function<Complex(double)>& symbol) {
  if (u.spec.kind != ManifoldKind::Torus)
    throw std::invalid_argument("spectral path is defined on tori only; use the convolution path");
  const int n = u.ambient_dim();
  const int N = u.res;
  const int lo = -(N / 2);
  const Complex i2pi(0.0, 2.0 * kPi);

  GridFunction out = u;
  const auto sizes = out.axis_sizes();

  // Forward transforms, axis by axis.
  for (int a = 0; a < n; ++a) {
    const double shift = u.spec.spin.contains(a + 1) ? 0.5 : 0.0;
    MatXc fwd(N, N);
    for (int r = 0; r < N; ++r)
      for (int j = 0; j < N; ++j)
        fwd(r, j) = std::exp(-i2pi * ((r + lo + shift) * j / static_cast<double>(N))) /
                    static_cast<double>(N);
    apply_along_axis(out.samples, sizes, a, fwd);
  }

  // Multiplier on each mode.
  const auto modes = spectral_modes(u.spec, N);
  for (std::int64_t flat = 0; flat < out.samples.size(); ++flat)
    out.samples[flat] *= symbol(modes[flat].lambda);

  // Inverse transforms.
  for (int a = 0; a < n; ++a) {
    const double shift = u.spec.spin.contains(a + 1) ? 0.5 : 0.0;
    MatXc inv(N, N);
    for (int j = 0; j < N; ++j)
      for (int r = 0; r < N; ++r)
        inv(j, r) = std::exp(i2pi * ((r + lo + shift) * j / static_cast<double>(N)));
    apply_along_axis(out.samples, sizes, a, inv);
  }
  return out;
}

GridFunction apply_spectral(const GridFunction& u0, double t, const RegKernelParams& params) {
  if (params.dim != u0.ambient_dim())
    throw std::invalid_argument("apply_spectral: params dimension mismatch");
  if (t < 0.0) throw std::invalid_argument("apply_spectral: t must be >= 0");
  if (t == 0.0) return u0;
  const Complex inv_kappa(params.epsilon, -1.0);  // 1/kappa = eps - i
  return apply_spectral_symbol(
      u0, [&](double lambda) { return std::exp(-t * lambda * inv_kappa); });
}

GridFunction apply_convolution(const GridFunction& u0, double t,
                               const RegKernelParams& params, const TruncationPolicy& policy) {
  if (params.dim != u0.ambient_dim())
    throw std::invalid_argument("apply_convolution: params dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("apply_convolution: t must be > 0");

  const double w = u0.weight();
  const Complex mass = mass_constant(params);

  GridFunction out = u0;

  if (u0.spec.kind == ManifoldKind::Torus) {
    // chi-twisted circular convolution: only N^n kernel differences exist,
    // the rest follow from the quasi-periodicity of the periodized kernel.
    const int n = u0.ambient_dim();
    const int N = u0.res;
    const std::int64_t total = u0.count();
    VecXc table(total);
    const MultiIndex zero = MultiIndex::Zero(n);
    const VecX origin = VecX::Zero(n);
    for (std::int64_t flat = 0; flat < total; ++flat) {
      const VecXi r = u0.decode(flat);
      VecX coords(n);
      for (int a = 0; a < n; ++a) coords[a] = static_cast<double>(r[a]) / N;
      table[flat] = periodized_eval(u0.spec, u0.spec.lattice.basis() * coords, origin, t,
                                    params, policy, zero);
    }
    for (std::int64_t jx = 0; jx < total; ++jx) {
      const VecXi j = u0.decode(jx);
      KahanSum acc;
      for (std::int64_t jy = 0; jy < total; ++jy) {
        const VecXi jp = u0.decode(jy);
        VecXi r(n), carry(n);
        for (int a = 0; a < n; ++a) {
          int diff = j[a] - jp[a];
          int rr = diff % N;
          if (rr < 0) rr += N;
          r[a] = rr;
          carry[a] = (rr - diff) / N;
        }
        const double chi = character(u0.spec.spin, carry);
        acc.add(chi * table[u0.index(r)] * u0.samples[jy]);
      }
      out.samples[jx] = acc.value() * w / mass;
    }
    return out;
  }

  // Generic path: point-pair Green kernel. Quadratic in the grid size, meant
  // for desk-scale grids on the cylinder, Moebius and Klein geometries.
  const std::int64_t total = u0.count();
  for (std::int64_t jx = 0; jx < total; ++jx) {
    const VecX x = u0.point_flat(jx);
    KahanSum acc;
    for (std::int64_t jy = 0; jy < total; ++jy)
      acc.add(periodized_green(u0.spec, x, u0.point_flat(jy), t, params, policy) *
              u0.samples[jy]);
    out.samples[jx] = acc.value() * w / mass;
  }
  return out;
}

double dissipativity_pairing(const TestField& u, int dim, double half_extent,
                             int resolution, double p) {
  if (!(p > 1.0 && p < 3.0))
    throw std::invalid_argument("dissipativity_pairing: p must lie in (1, 3)");
  if (dim < 1 || resolution < 2 || !(half_extent > 0.0))
    throw std::invalid_argument("dissipativity_pairing: bad box");

  const double h = 2.0 * half_extent / resolution;
  const double w = std::pow(h, dim);
  std::int64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= resolution;

  double acc = 0.0;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    VecX x(dim);
    std::int64_t rem = flat;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = -half_extent + (static_cast<double>(rem % resolution) + 0.5) * h;
      rem /= resolution;
    }
    const Complex uv = u.value(x);
    const double mag = std::abs(uv);
    if (mag == 0.0) continue;  // |u|^{p-2} u -> 0 for p > 1
    const Complex lap = u.laplacian(x);
    // |u|^{p-1} Re(conj(u/|u|) lap): avoids overflowing |u|^{p-2} for p < 2.
    acc += w * std::pow(mag, p - 1.0) * ((std::conj(uv) / mag) * lap).real();
  }
  return acc;
}

WeakLimitResult weak_limit_pairings(const std::function<double(const VecX&, double)>& phi,
                                    const ManifoldSpec& spec,
                                    const std::vector<double>& eps_sequence, double t_lo,
                                    double t_hi, int space_res, int time_res,
                                    const TruncationPolicy& policy) {
  if (eps_sequence.empty()) return {};
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] > 0.0))
      throw std::invalid_argument("weak_limit_pairings: eps must be > 0");
    if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))
      throw std::invalid_argument("weak_limit_pairings: eps must be strictly decreasing");
  }
  if (!(0.0 < t_lo && t_lo < t_hi))
    throw std::invalid_argument("weak_limit_pairings: need 0 < t_lo < t_hi");

  const int n = spec.ambient_dim();
  const double wt = (t_hi - t_lo) / time_res;
  const double wx = spec.lattice.covolume() / std::pow(static_cast<double>(space_res), n);
  const MultiIndex zero = MultiIndex::Zero(n);
  const VecX origin = VecX::Zero(n);

  std::int64_t space_total = 1;
  for (int a = 0; a < n; ++a) space_total *= space_res;

  WeakLimitResult result;
  for (double eps : eps_sequence) {
    const RegKernelParams params = make_params(eps, n);
    KahanSum acc;
    for (int it = 0; it < time_res; ++it) {
      const double t = t_lo + (it + 0.5) * wt;
      for (std::int64_t flat = 0; flat < space_total; ++flat) {
        VecX coords(n);
        std::int64_t rem = flat;
        for (int a = n - 1; a >= 0; --a) {
          coords[a] = (static_cast<double>(rem % space_res) + 0.5) / space_res;
          rem /= space_res;
        }
        const VecX x = spec.lattice.basis() * coords;
        const double test = phi(x, t);
        if (test == 0.0) continue;
        acc.add(wx * wt * test * periodized_eval(spec, x, origin, t, params, policy, zero));
      }
    }
    result.pairings.push_back(acc.value());
  }
  for (std::size_t i = 0; i + 1 < result.pairings.size(); ++i)
    result.differences.push_back(std::abs(result.pairings[i + 1] - result.pairings[i]));
  return result;
}

}  // namespace rschrod
