#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rschrod {

using Real = double;
using Complex = std::complex<double>;

using VecX = Eigen::VectorXd;
using VecXc = Eigen::VectorXcd;
using VecXi = Eigen::VectorXi;
using MatX = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Thrown when a kernel evaluation or lattice sum produces a non-finite
// value. Callers never see a silent NaN.
class OverflowError : public std::runtime_error {
public:
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the requested truncation tolerance cannot be met within the
// policy's radius cap, or when a doubling validation fails.
class TruncationError : public std::runtime_error {
public:
  explicit TruncationError(const std::string& what)
      : std::runtime_error(what) {}
};

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Compensated (Kahan) accumulator; lattice sums run in a fixed order and
// need sub-ulp-growth accumulation to hit 1e-10 periodicity tolerances.
class KahanSum {
public:
  void add(Complex term) {
    const Complex y = term - comp_;
    const Complex t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  Complex value() const { return sum_; }

private:
  Complex sum_{0.0, 0.0};
  Complex comp_{0.0, 0.0};
};

// FNV-1a, used to stamp configs into reports reproducibly across runs.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rschrod
