#include "rschrod/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rschrod {

ManifoldSpec make_manifold(ManifoldKind kind, const Lattice& lattice, SpinStructure spin) {
  const int n = lattice.ambient_dim();
  const int k = lattice.rank();
  if (spin.members >> k)
    throw std::invalid_argument("manifold: spin subset exceeds lattice rank");

  switch (kind) {
    case ManifoldKind::Torus:
      if (k != n) throw std::invalid_argument("torus: lattice must have full rank");
      break;
    case ManifoldKind::Cylinder:
      // k = n is the degenerate torus subseries and is allowed.
      if (k < 1 || k > n) throw std::invalid_argument("cylinder: rank must be in 1..n");
      break;
    case ManifoldKind::Moebius: {
      if (k < 1 || k >= n)
        throw std::invalid_argument("moebius: rank must be in 1..n-1");
      for (int j = 0; j < k; ++j)
        for (int r = k; r < n; ++r)
          if (std::abs(lattice.basis()(r, j)) > 1e-12)
            throw std::invalid_argument(
                "moebius: lattice must be supported on the first k coordinates");
      break;
    }
    case ManifoldKind::Klein: {
      if (n < 2) throw std::invalid_argument("klein: ambient dimension must be >= 2");
      if (k != n) throw std::invalid_argument("klein: lattice must have full rank");
      const MatX& b = lattice.basis();
      bool normalized = std::abs(b(n - 1, n - 1) - 1.0) <= 1e-12;
      for (int r = 0; r + 1 < n && normalized; ++r)
        normalized = std::abs(b(r, n - 1)) <= 1e-12;
      for (int j = 0; j + 1 < n && normalized; ++j)
        normalized = std::abs(b(n - 1, j)) <= 1e-12;
      if (!normalized)
        throw std::invalid_argument(
            "klein: lattice must be normalized as Omega_{n-1} + Z e_n "
            "(bring it to this form by applying a rotation and a dilation)");
      break;
    }
  }
  return ManifoldSpec{kind, lattice, spin};
}

std::vector<ShiftedPoint> enumerate_shifted(const Lattice& lattice, const VecX& x,
                                            double radius) {
  if (radius < 0.0) throw std::invalid_argument("enumerate_shifted: radius must be >= 0");
  if (x.size() != lattice.ambient_dim())
    throw std::invalid_argument("enumerate_shifted: point dimension mismatch");
  const int k = lattice.rank();

  // Coefficient box from the dual basis: |m_i| = |<w_i, v>| <= |w_i| |v|
  // and |v| <= radius + |x| whenever |x + v| <= radius.
  const double reach = radius + x.norm();
  VecXi bound(k);
  for (int i = 0; i < k; ++i)
    bound[i] = static_cast<int>(std::ceil(reach * lattice.dual_basis().col(i).norm()));

  std::vector<ShiftedPoint> out;
  VecXi m(k);
  m.setConstant(0);
  for (int i = 0; i < k; ++i) m[i] = -bound[i];
  const double r2 = radius * radius;
  while (true) {
    const VecX v = lattice.vector(m);
    const double d2 = (x + v).squaredNorm();
    if (d2 <= r2) out.push_back({m, v, std::sqrt(d2)});

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

  std::sort(out.begin(), out.end(), [](const ShiftedPoint& a, const ShiftedPoint& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    for (int i = 0; i < a.m.size(); ++i)
      if (a.m[i] != b.m[i]) return a.m[i] < b.m[i];
    return false;
  });
  return out;
}

Reduction reduce(const Lattice& lattice, const VecX& x) {
  if (!lattice.full_rank())
    throw std::invalid_argument("reduce: lattice must have full rank");
  if (x.size() != lattice.ambient_dim())
    throw std::invalid_argument("reduce: point dimension mismatch");
  const VecX coords = lattice.basis().partialPivLu().solve(x);
  const int n = lattice.ambient_dim();
  VecXi m(n);
  VecX frac(n);
  for (int i = 0; i < n; ++i) {
    double f = std::floor(coords[i]);
    double r = coords[i] - f;
    if (r >= 1.0) {  // rounding at the cell edge
      r -= 1.0;
      f += 1.0;
    }
    m[i] = static_cast<int>(f);
    frac[i] = r;
  }
  return Reduction{lattice.basis() * frac, m};
}

VecX identify(const ManifoldSpec& spec, const VecX& x, const VecXi& m) {
  const int n = spec.ambient_dim();
  if (x.size() != n) throw std::invalid_argument("identify: point dimension mismatch");
  switch (spec.kind) {
    case ManifoldKind::Moebius: {
      if (m.size() != spec.rank())
        throw std::invalid_argument("identify: coefficient length mismatch");
      VecX y = x - spec.lattice.vector(m);
      y[n - 1] = sgn_moebius(m) * x[n - 1];
      return y;
    }
    case ManifoldKind::Klein: {
      if (m.size() != n) throw std::invalid_argument("identify: coefficient length mismatch");
      VecX y = x;
      for (int j = 0; j + 1 < n; ++j) y -= m[j] * spec.lattice.basis().col(j);
      const int mn = m[n - 1];
      const double flip = (mn % 2 == 0) ? 1.0 : -1.0;
      y[n - 1] = flip * (x[n - 1] - mn);
      return y;
    }
    default:
      throw std::invalid_argument("identify: defined for moebius and klein only");
  }
}

}  // namespace rschrod
