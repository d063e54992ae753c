#pragma once

// Test-only reference implementations, kept independent of the library
// paths they check: composite Simpson quadrature, brute-force lattice
// scans, centered finite differences.

#include <functional>
#include <random>
#include <vector>

#include "rschrod/base.hpp"
#include "rschrod/geometry.hpp"

namespace oracles {

using rschrod::Complex;
using rschrod::VecX;
using rschrod::VecXi;

// Composite Simpson on [lo, hi] with 2*half intervals.
inline Complex simpson(const std::function<Complex(double)>& f, double lo, double hi,
                       int half) {
  const int n = 2 * half;
  const double h = (hi - lo) / n;
  Complex acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

// Tensor-product Simpson over [lo, hi]^n.
inline Complex simpson_nd(const std::function<Complex(const VecX&)>& f, int dim, double lo,
                          double hi, int half) {
  if (dim == 1)
    return simpson([&](double x) { return f(VecX::Constant(1, x)); }, lo, hi, half);
  return simpson(
      [&](double x_outer) {
        return simpson_nd(
            [&](const VecX& inner) {
              VecX full(dim);
              full[0] = x_outer;
              full.tail(dim - 1) = inner;
              return f(full);
            },
            dim - 1, lo, hi, half);
      },
      lo, hi, half);
}

// Every lattice point of a coefficient box, in plain lexicographic order.
inline std::vector<VecXi> coefficient_box(int rank, int bound) {
  std::vector<VecXi> out;
  VecXi m = VecXi::Constant(rank, -bound);
  while (true) {
    out.push_back(m);
    int axis = rank - 1;
    while (axis >= 0) {
      if (m[axis] < bound) {
        ++m[axis];
        break;
      }
      m[axis] = -bound;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace oracles
