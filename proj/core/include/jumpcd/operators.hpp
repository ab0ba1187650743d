// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "jumpcd/kernel.hpp"

namespace jumpcd {

// Bounded function on Z: explicit values on [-W, W], a constant outside.
class LatticeFunction {
 public:
  LatticeFunction(std::int64_t W, std::vector<double> values, double exterior);

  static LatticeFunction constant(std::int64_t W, double c);
  static LatticeFunction indicator(std::int64_t W, std::int64_t x0);

  std::int64_t window() const { return W_; }
  double exterior() const { return exterior_; }
  const std::vector<double>& values() const { return values_; }
  bool in_window(std::int64_t x) const { return x >= -W_ && x <= W_; }

  double operator()(std::int64_t x) const {
    return in_window(x) ? values_[static_cast<std::size_t>(x + W_)] : exterior_;
  }
  double sup_abs() const;

  // y -> u(x + y) - u(x), on the window [-(W + |x|), W + |x|].
  LatticeFunction recentred(std::int64_t x) const;
  LatticeFunction negated() const;

 private:
  std::int64_t W_;
  std::vector<double> values_;
  double exterior_;
};

// w(j) = (u(j) + u(-j)) / 2; requires u(0) = 0.
LatticeFunction symmetrize(const LatticeFunction& u);

// Lu(x) = sum_j k(j) (u(x+j) - u(x)). The exterior contributes through |k|_1 in
// closed form, so the only error is the accuracy of |k|_1 (bounded by tol).
double apply_L(const Kernel& k, const LatticeFunction& u, std::int64_t x, double tol = 1e-10);

// sum_j k(j) Upsilon(u(x+j) - u(x))
double psi_upsilon(const Kernel& k, const LatticeFunction& u, std::int64_t x,
                   double tol = 1e-10);

enum class WeightSide { l, j };

// 1/2 sum_{j,l} k(j) k(l) e^{u(x+l)-u(x)} Upsilon(u(x+j+l) - u(x+j) - u(x+l) + u(x)).
// WeightSide::j evaluates the same double sum with the exponential weight on x+j.
double psi2_upsilon(const Kernel& k, const LatticeFunction& u, std::int64_t x,
                    double tol = 1e-10, WeightSide side = WeightSide::l);

// sum_j k(j)^2 H(-w(j)) with w the symmetrization of u; requires u(0) = 0.
double basic_lower_bound(const Kernel& k, const LatticeFunction& u, double tol = 1e-10);

// Convenience restricted-window variants used by the conservative heat solver:
// sums run over y in [-W, W] only, ignoring the exterior.
double apply_L_window(const Kernel& k, const LatticeFunction& u, std::int64_t x);
double psi_upsilon_window(const Kernel& k, const LatticeFunction& u, std::int64_t x);

}  // namespace jumpcd
