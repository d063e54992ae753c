#pragma once

#include <cstdint>
#include <vector>

#include "rschrod/base.hpp"

// Lattices Omega_k = Z v_1 + ... + Z v_k embedded in R^n, sign characters
// realizing the 2^k spin/pin structures, and the four flat quotient
// geometries (torus, cylinder, Moebius strip, Klein bottle).

namespace rschrod {

class Lattice {
public:
  // Basis vectors are columns of `basis` (n x k), linearly independent.
  static Lattice from_basis(const MatX& basis);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int rank() const { return static_cast<int>(basis_.cols()); }
  bool full_rank() const { return rank() == ambient_dim(); }

  const MatX& basis() const { return basis_; }
  const MatX& gram() const { return gram_; }
  // Dual vectors w_i (columns, in the span of the basis): <w_i, v_j> = delta_ij.
  const MatX& dual_basis() const { return dual_; }

  VecX vector(const VecXi& m) const { return basis_ * m.cast<double>(); }
  double covolume() const { return covolume_; }
  // Upper bound on the covering radius within the lattice span: every point
  // of the span is within half the sum of basis lengths of a lattice point.
  double covering_bound() const { return covering_bound_; }

private:
  MatX basis_, gram_, dual_;
  double covolume_ = 0.0;
  double covering_bound_ = 0.0;
};

inline Lattice Lattice::from_basis(const MatX& basis) {
  if (basis.rows() < 1 || basis.cols() < 1 || basis.cols() > basis.rows())
    throw std::invalid_argument("lattice basis: need n x k with 1 <= k <= n");
  Eigen::JacobiSVD<MatX> svd(basis);
  const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  if (!std::isfinite(cond) || cond > 1e12)
    throw std::invalid_argument("lattice basis: singular or ill-conditioned (cond > 1e12)");
  Lattice lat;
  lat.basis_ = basis;
  lat.gram_ = basis.transpose() * basis;
  lat.dual_ = basis * lat.gram_.inverse();
  lat.covolume_ = std::sqrt(lat.gram_.determinant());
  lat.covering_bound_ = 0.0;
  for (int i = 0; i < basis.cols(); ++i) lat.covering_bound_ += 0.5 * basis.col(i).norm();
  return lat;
}

// Sign character chi_S(m) = (-1)^{sum_{i in S} m_i} attached to a generator
// subset S (bit i-1 set means generator i is in S). S = {1..l} recovers the
// sublattice-split construction; an arbitrary subset exposes all 2^k
// structures symmetrically.
struct SpinStructure {
  std::uint32_t members = 0;

  static SpinStructure trivial() { return SpinStructure{0}; }
  static SpinStructure from_indices(std::initializer_list<int> indices, int rank) {
    SpinStructure s;
    for (int i : indices) {
      if (i < 1 || i > rank) throw std::invalid_argument("spin structure: index out of range");
      s.members |= std::uint32_t{1} << (i - 1);
    }
    return s;
  }
  bool contains(int i) const { return (members >> (i - 1)) & 1u; }
};

inline int character(const SpinStructure& spin, const VecXi& m) {
  int parity = 0;
  for (int i = 0; i < m.size(); ++i)
    if ((spin.members >> i) & 1u) parity += m[i];
  return (parity % 2 == 0) ? 1 : -1;
}

// Sign of a Moebius deck transformation: the parity character
// (-1)^{m_1 + ... + m_k}. For rank 1 this is the indicator of 2*Omega_1;
// for higher rank only the character form is multiplicative, which the
// group law of the identification requires.
inline int sgn_moebius(const VecXi& m) {
  int parity = 0;
  for (int i = 0; i < m.size(); ++i) parity += m[i];
  return (parity % 2 == 0) ? 1 : -1;
}

enum class ManifoldKind { Torus, Cylinder, Moebius, Klein };

inline const char* to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::Cylinder: return "cylinder";
    case ManifoldKind::Moebius: return "moebius";
    case ManifoldKind::Klein: return "klein";
  }
  return "?";
}

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Torus;
  Lattice lattice;
  SpinStructure spin;

  int ambient_dim() const { return lattice.ambient_dim(); }
  int rank() const { return lattice.rank(); }
};

// Validating constructor. Torus and Klein need a full-rank lattice; the
// Klein lattice must be normalized as Omega_{n-1} + Z e_n (last generator
// e_n, the others supported on the first n-1 coordinates). Moebius lattices
// act on the first k coordinates and flip the last one, so their basis must
// vanish outside the first k rows. A cylinder with k = n degenerates to the
// torus and is accepted.
ManifoldSpec make_manifold(ManifoldKind kind, const Lattice& lattice, SpinStructure spin);

struct ShiftedPoint {
  VecXi m;      // lattice coefficients
  VecX v;       // lattice vector basis * m
  double dist;  // |x + v|
};

// All lattice vectors v with |x + v| <= radius, sorted by |x + v| ascending
// with lexicographic ties on m. The deterministic order makes downstream
// sums bit-reproducible.
std::vector<ShiftedPoint> enumerate_shifted(const Lattice& lattice, const VecX& x,
                                            double radius);

struct Reduction {
  VecX representative;  // lattice coordinates in [0,1)^n
  VecXi m;              // x = representative + basis * m
};

// Canonical projection x -> x mod Omega_n (full-rank lattices only).
Reduction reduce(const Lattice& lattice, const VecX& x);

// The identification map of the non-orientable quotients: given shift
// coefficients m, returns the point equivalent to x.
//   Moebius: (x_ + v, mid, x_n) ~ (x_, mid, sgn(v) x_n)
//   Klein:   (x_ + v_ + (x_n + m_n) e_n) ~ (x_, (-1)^{m_n} x_n)
VecX identify(const ManifoldSpec& spec, const VecX& x, const VecXi& m);

}  // namespace rschrod
