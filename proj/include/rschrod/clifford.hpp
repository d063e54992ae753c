#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

#include "rschrod/base.hpp"

// Complexified Clifford algebra Cl_{0,n}: generators satisfy
// e_i e_j + e_j e_i = -2 delta_{ij}. Blades are indexed by bitmasks over
// {1..n} in canonical ascending generator order; bit (i-1) set means e_i
// participates.

namespace rschrod {

// Sign of e_A * e_B together with the result blade A xor B. The sign counts
// transpositions needed to interleave B into A plus one -1 per contracted
// generator (e_i^2 = -1).
inline int blade_product_sign(std::uint32_t a, std::uint32_t b) {
  int swaps = 0;
  std::uint32_t rest = a >> 1;
  while (rest != 0) {
    swaps += std::popcount(rest & b);
    rest >>= 1;
  }
  const int contractions = std::popcount(a & b);
  return ((swaps + contractions) % 2 == 0) ? 1 : -1;
}

inline std::uint32_t blade_product_blade(std::uint32_t a, std::uint32_t b) {
  return a ^ b;
}

// Precomputed (result, sign) for every blade pair of a fixed dimension.
class BladeProductTable {
public:
  explicit BladeProductTable(int dim) : dim_(dim) {
    if (dim < 0 || dim > 16) throw std::invalid_argument("blade table: dimension out of range");
    const std::size_t size = std::size_t{1} << dim;
    result_.resize(size * size);
    sign_.resize(size * size);
    for (std::size_t a = 0; a < size; ++a)
      for (std::size_t b = 0; b < size; ++b) {
        result_[a * size + b] = blade_product_blade(static_cast<std::uint32_t>(a),
                                                    static_cast<std::uint32_t>(b));
        sign_[a * size + b] = static_cast<std::int8_t>(
            blade_product_sign(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
      }
  }

  int dim() const { return dim_; }
  std::uint32_t result(std::uint32_t a, std::uint32_t b) const {
    return result_[(std::size_t{a} << dim_) + b];
  }
  int sign(std::uint32_t a, std::uint32_t b) const {
    return sign_[(std::size_t{a} << dim_) + b];
  }

private:
  int dim_;
  std::vector<std::uint32_t> result_;
  std::vector<std::int8_t> sign_;
};

template <class Scalar = Complex>
class Multivector {
public:
  using Coefficients = Eigen::Vector<Scalar, Eigen::Dynamic>;

  explicit Multivector(int dim)
      : dim_(check_dim(dim)), coeff_(Coefficients::Zero(std::int64_t{1} << dim)) {}

  static Multivector scalar(int dim, Scalar value) {
    Multivector m(dim);
    m.coeff_[0] = value;
    return m;
  }
  // Basis blade e_A for the bitmask A.
  static Multivector blade(int dim, std::uint32_t mask, Scalar value = Scalar(1)) {
    Multivector m(dim);
    m.coeff_[mask] = value;
    return m;
  }
  // Generator e_i, 1-based index.
  static Multivector generator(int dim, int i) {
    if (i < 1 || i > dim) throw std::invalid_argument("generator index out of range");
    return blade(dim, std::uint32_t{1} << (i - 1));
  }

  int dim() const { return dim_; }
  std::int64_t size() const { return coeff_.size(); }
  Scalar operator[](std::uint32_t mask) const { return coeff_[mask]; }
  Scalar& operator[](std::uint32_t mask) { return coeff_[mask]; }
  const Coefficients& coefficients() const { return coeff_; }

  Scalar scalar_part() const { return coeff_[0]; }

  Multivector& operator+=(const Multivector& o) {
    check_same(o);
    coeff_ += o.coeff_;
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    check_same(o);
    coeff_ -= o.coeff_;
    return *this;
  }
  Multivector& operator*=(Scalar s) {
    coeff_ *= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, Scalar s) { return a *= s; }
  friend Multivector operator*(Scalar s, Multivector a) { return a *= s; }

  void check_same(const Multivector& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("multivector dimension mismatch");
  }

private:
  static int check_dim(int dim) {
    if (dim < 1 || dim > 16) throw std::invalid_argument("multivector dimension out of range");
    return dim;
  }

  int dim_;
  Coefficients coeff_;
};

template <class Scalar>
Multivector<Scalar> geometric_product(const Multivector<Scalar>& a,
                                      const Multivector<Scalar>& b) {
  a.check_same(b);
  Multivector<Scalar> out(a.dim());
  const std::uint32_t size = std::uint32_t{1} << a.dim();
  for (std::uint32_t ma = 0; ma < size; ++ma) {
    const Scalar ca = a[ma];
    if (ca == Scalar(0)) continue;
    for (std::uint32_t mb = 0; mb < size; ++mb) {
      const Scalar cb = b[mb];
      if (cb == Scalar(0)) continue;
      const int sign = blade_product_sign(ma, mb);
      out[ma ^ mb] += static_cast<Scalar>(sign) * ca * cb;
    }
  }
  return out;
}

template <class Scalar>
Multivector<Scalar> operator*(const Multivector<Scalar>& a, const Multivector<Scalar>& b) {
  return geometric_product(a, b);
}

// Clifford conjugation u -> u-bar: e_A picks up (-1)^{|A|(|A|+1)/2} and the
// coefficient is complex-conjugated. Satisfies [e_A bar(e_A)]_0 = +1.
template <class Scalar>
Multivector<Scalar> bar(const Multivector<Scalar>& u) {
  Multivector<Scalar> out(u.dim());
  const std::uint32_t size = std::uint32_t{1} << u.dim();
  for (std::uint32_t m = 0; m < size; ++m) {
    const int k = std::popcount(m);
    const int s = ((k * (k + 1) / 2) % 2 == 0) ? 1 : -1;
    using std::conj;
    out[m] = static_cast<Scalar>(s) * conj(u[m]);
  }
  return out;
}

// |u|^2 = 2^n sum_A |u_A|^2.
template <class Scalar>
double modulus_sq(const Multivector<Scalar>& u) {
  double acc = 0.0;
  const std::uint32_t size = std::uint32_t{1} << u.dim();
  for (std::uint32_t m = 0; m < size; ++m) acc += std::norm(u[m]);
  return std::ldexp(acc, u.dim());
}

// Pointwise pairing 2^n [u bar(v)]_0, evaluated through the product so the
// blade bookkeeping is exercised rather than assumed.
template <class Scalar>
Scalar pointwise_pairing(const Multivector<Scalar>& u, const Multivector<Scalar>& v) {
  const Multivector<Scalar> p = geometric_product(u, bar(v));
  return static_cast<Scalar>(std::ldexp(1.0, u.dim())) * p.scalar_part();
}

// Multivector samples on a uniform grid over an axis-aligned box. Used by
// the finite-difference Dirac operator; the grid's space dimension equals
// the algebra dimension.
template <class Scalar = Complex>
struct SampledField {
  int dim = 0;               // space = algebra dimension
  VecXi shape;               // points per axis
  double spacing = 0.0;
  VecX origin;               // coordinates of grid node (0,...,0)
  std::vector<Multivector<Scalar>> values;

  std::int64_t count() const {
    std::int64_t c = 1;
    for (int a = 0; a < dim; ++a) c *= shape[a];
    return c;
  }
  std::int64_t index(const VecXi& j) const {
    std::int64_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * shape[a] + j[a];
    return idx;
  }
  VecX point(const VecXi& j) const {
    VecX x = origin;
    for (int a = 0; a < dim; ++a) x[a] += spacing * j[a];
    return x;
  }
};

template <class Scalar = Complex>
SampledField<Scalar> sample_scalar_field(int dim, const VecXi& shape, double spacing,
                                         const VecX& origin,
                                         const std::function<Scalar(const VecX&)>& f) {
  SampledField<Scalar> field;
  field.dim = dim;
  field.shape = shape;
  field.spacing = spacing;
  field.origin = origin;
  field.values.reserve(field.count());
  VecXi j = VecXi::Zero(dim);
  const std::int64_t total = field.count();
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    for (int a = dim - 1; a >= 0; --a) {
      j[a] = static_cast<int>(rem % shape[a]);
      rem /= shape[a];
    }
    field.values.push_back(Multivector<Scalar>::scalar(dim, f(field.point(j))));
  }
  return field;
}

// Centered-difference Dirac operator D = sum_j e_j d/dx_j. Output lives on
// the interior (one node trimmed per side); applying it twice is the
// discrete factorization check D(Du) ~ -Lap u.
template <class Scalar>
SampledField<Scalar> dirac_fd(const SampledField<Scalar>& u) {
  const int n = u.dim;
  for (int a = 0; a < n; ++a)
    if (u.shape[a] < 3) throw std::invalid_argument("dirac_fd: grid too small for stencil");

  SampledField<Scalar> out;
  out.dim = n;
  out.shape = u.shape.array() - 2;
  out.spacing = u.spacing;
  out.origin = u.origin + VecX::Constant(n, u.spacing);
  out.values.reserve(out.count());

  const double inv2h = 1.0 / (2.0 * u.spacing);
  VecXi j = VecXi::Zero(n);
  const std::int64_t total = out.count();
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    for (int a = n - 1; a >= 0; --a) {
      j[a] = static_cast<int>(rem % out.shape[a]);
      rem /= out.shape[a];
    }
    Multivector<Scalar> d(n);
    for (int a = 0; a < n; ++a) {
      VecXi jp = j, jm = j;
      for (int b = 0; b < n; ++b) {
        jp[b] += 1;
        jm[b] += 1;
      }
      jp[a] += 1;
      jm[a] -= 1;
      Multivector<Scalar> diff = u.values[u.index(jp)] - u.values[u.index(jm)];
      d += geometric_product(Multivector<Scalar>::generator(n, a + 1), diff) *
           static_cast<Scalar>(inv2h);
    }
    out.values.push_back(d);
  }
  return out;
}

// Discrete <u, v> = sum_i w_i 2^n [u_i bar(v_i)]_0 with a shared uniform
// weight. Conjugate-symmetric by construction.
template <class Scalar>
Scalar inner_product(const SampledField<Scalar>& u, const SampledField<Scalar>& v,
                     double weight) {
  if (u.dim != v.dim || u.shape != v.shape)
    throw std::invalid_argument("inner_product: grid mismatch");
  Scalar acc(0);
  const std::int64_t total = u.count();
  for (std::int64_t i = 0; i < total; ++i)
    acc += static_cast<Scalar>(weight) * pointwise_pairing(u.values[i], v.values[i]);
  return acc;
}

}  // namespace rschrod
