#pragma once

#include <functional>
#include <map>
#include <vector>

#include "rschrod/base.hpp"

// Regularized fundamental solution of the hypoelliptic evolution operator
// (Lap - kappa d/dt), kappa = (eps + i)/(eps^2 + 1):
//
//   e_eps(x,t) = (eps+i) H(t) (4 pi (eps+i) t)^{-n/2}
//                  exp( -(eps+i) |x|^2 / (4 (eps^2+1) t) )
//
// and its eps -> 0 limit
//
//   e_0(x,t) = i H(t) (4 pi i t)^{-n/2} exp( -i |x|^2 / (4t) ).
//
// Complex powers use the principal branch; for eps, t > 0 the base
// 4 pi (eps+i) t stays in the open right half-plane, so the branch cut is
// never approached.

namespace rschrod {

struct RegKernelParams {
  double epsilon = 0.0;
  int dim = 0;
  Complex kappa;  // (eps + i)/(eps^2 + 1) == 1/(eps - i)

  // Modulus decay rate of the Gaussian factor: |e_eps| carries
  // exp(-decay_rate(t) |x|^2) for t > 0.
  double decay_rate(double t) const {
    return epsilon / (4.0 * (epsilon * epsilon + 1.0) * t);
  }
  // Exponent coefficient a(t) with e_eps = C(t) exp(-a(t) |x|^2).
  Complex gauss_rate(double t) const { return kappa / (4.0 * t); }
  // Modulus of the x-independent prefactor for t > 0.
  double prefactor_magnitude(double t) const {
    const double mod = std::abs(Complex(epsilon, 1.0));
    return mod * std::pow(4.0 * kPi * mod * t, -0.5 * dim);
  }
};

inline RegKernelParams make_params(double epsilon, int n) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("make_params: epsilon must be > 0 (use eval_limit for eps = 0)");
  if (n < 1) throw std::invalid_argument("make_params: dimension must be >= 1");
  RegKernelParams p;
  p.epsilon = epsilon;
  p.dim = n;
  p.kappa = Complex(epsilon, 1.0) / (epsilon * epsilon + 1.0);
  return p;
}

inline Complex eval_regularized(Eigen::Ref<const VecX> x, double t,
                                const RegKernelParams& params) {
  if (!(t > 0.0)) return Complex(0.0, 0.0);
  const Complex ei(params.epsilon, 1.0);
  const Complex pref = ei * std::pow(4.0 * kPi * ei * t, -0.5 * params.dim);
  const Complex expo = -ei * x.squaredNorm() /
                       (4.0 * (params.epsilon * params.epsilon + 1.0) * t);
  const Complex value = pref * std::exp(expo);
  if (!is_finite(value)) throw OverflowError("eval_regularized: non-finite result");
  return value;
}

inline Complex eval_limit(Eigen::Ref<const VecX> x, double t, int n) {
  if (n < 1) throw std::invalid_argument("eval_limit: dimension must be >= 1");
  if (!(t > 0.0)) {
    if (t == 0.0 && x.squaredNorm() == 0.0)
      throw std::domain_error("eval_limit: singular point x = 0, t = 0");
    return Complex(0.0, 0.0);
  }
  const Complex i(0.0, 1.0);
  const Complex value =
      i * std::pow(4.0 * kPi * i * t, -0.5 * n) * std::exp(-i * x.squaredNorm() / (4.0 * t));
  if (!is_finite(value)) throw OverflowError("eval_limit: non-finite result");
  return value;
}

// Mass constant c(eps,n) = integral of e_eps over R^n; t-independent.
// Gaussian integral in closed form: (eps+i) ((eps-i)/(eps+i))^{n/2}.
inline Complex mass_constant(const RegKernelParams& params) {
  const Complex ei(params.epsilon, 1.0);
  const Complex ratio = Complex(params.epsilon, -1.0) / ei;
  return ei * std::pow(ratio, 0.5 * params.dim);
}

using MultiIndex = VecXi;

inline int multi_index_order(const MultiIndex& alpha) {
  int total = 0;
  for (int i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0) throw std::invalid_argument("multi-index entries must be >= 0");
    total += alpha[i];
  }
  return total;
}

// Exact partial derivative d^alpha e_eps for fixed (t, alpha), prepared once
// and evaluated at many x. Derivatives of P(x) exp(-a|x|^2) obey
// d_j (P e) = (d_j P - 2 a x_j P) e, so the prefactor stays a polynomial;
// the representation series needs many accurate derivative terms, which
// rules out nested differencing.
class KernelDerivative {
public:
  KernelDerivative(const RegKernelParams& params, double t, MultiIndex alpha)
      : params_(params), t_(t), alpha_(std::move(alpha)) {
    if (alpha_.size() != params.dim)
      throw std::invalid_argument("kernel derivative: multi-index length != dimension");
    order_ = multi_index_order(alpha_);
    if (t_ > 0.0) build();
  }

  double t() const { return t_; }
  const MultiIndex& alpha() const { return alpha_; }

  Complex operator()(Eigen::Ref<const VecX> x) const {
    if (!(t_ > 0.0)) return Complex(0.0, 0.0);
    Complex poly(0.0, 0.0);
    for (const auto& [expo, coef] : monomials_) {
      Complex m = coef;
      for (int j = 0; j < params_.dim; ++j)
        for (int r = 0; r < expo[j]; ++r) m *= x[j];
      poly += m;
    }
    const Complex value = poly * eval_regularized(x, t_, params_);
    if (!is_finite(value)) throw OverflowError("kernel_derivative: non-finite result");
    return value;
  }

  // sum over monomials of |coeff| * r^degree; used by the truncation bound,
  // which must absorb the polynomial growth of derivative terms.
  struct MonomialBound {
    double coeff_abs;
    int degree;
  };
  std::vector<MonomialBound> monomial_bounds() const {
    std::vector<MonomialBound> out;
    out.reserve(monomials_.size());
    for (const auto& [expo, coef] : monomials_) {
      int deg = 0;
      for (int j = 0; j < params_.dim; ++j) deg += expo[j];
      out.push_back({std::abs(coef), deg});
    }
    return out;
  }

private:
  using Monomials = std::map<std::vector<int>, Complex>;

  void build() {
    const Complex two_a = params_.kappa / (2.0 * t_);
    monomials_.clear();
    monomials_[std::vector<int>(params_.dim, 0)] = Complex(1.0, 0.0);
    for (int j = 0; j < params_.dim; ++j)
      for (int r = 0; r < alpha_[j]; ++r) monomials_ = differentiate(monomials_, j, two_a);
  }

  Monomials differentiate(const Monomials& poly, int j, Complex two_a) const {
    Monomials out;
    for (const auto& [expo, coef] : poly) {
      if (expo[j] > 0) {
        std::vector<int> down = expo;
        down[j] -= 1;
        out[down] += coef * static_cast<double>(expo[j]);
      }
      std::vector<int> up = expo;
      up[j] += 1;
      out[up] -= coef * two_a;
    }
    return out;
  }

  RegKernelParams params_;
  double t_;
  MultiIndex alpha_;
  int order_ = 0;
  Monomials monomials_;
};

inline Complex kernel_derivative(Eigen::Ref<const VecX> x, double t,
                                 const RegKernelParams& params, const MultiIndex& alpha) {
  return KernelDerivative(params, t, alpha)(x);
}

// Centered finite-difference probe of (Lap - kappa d/dt) applied to a point
// function F(x,t). Second order in h; the time stencil must stay inside
// t > 0.
inline Complex pde_residual(const std::function<Complex(const VecX&, double)>& F,
                            Eigen::Ref<const VecX> x, double t,
                            const RegKernelParams& params, double h) {
  if (!(t - h > 0.0)) throw std::invalid_argument("pde_residual: time stencil crosses t = 0");
  const VecX xv = x;
  const Complex center = F(xv, t);
  Complex lap(0.0, 0.0);
  for (int j = 0; j < xv.size(); ++j) {
    VecX xp = xv, xm = xv;
    xp[j] += h;
    xm[j] -= h;
    lap += (F(xp, t) - 2.0 * center + F(xm, t)) / (h * h);
  }
  const Complex dt = (F(xv, t + h) - F(xv, t - h)) / (2.0 * h);
  return lap - params.kappa * dt;
}

}  // namespace rschrod
