// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/kernel.hpp"

namespace jumpcd {

struct HarnackPath {
  std::vector<std::int64_t> points;  // y_0, ..., y_N
  std::vector<double> rates;         // k(y_i - y_{i-1})
  double S = 0.0;                    // N * sum 1 / k(y_i - y_{i-1})

  std::size_t steps() const { return rates.size(); }
};

// Throws InvalidArgument naming the offending step for zero rates or repeated points.
HarnackPath harnack_sum(const Kernel& k, const std::vector<std::int64_t>& points);

// Exact minimiser of S over paths from x1 to x2 with at most n_max steps and all
// points in [min(x1,x2) - window_ext, max(x1,x2) + window_ext]. Ties prefer fewer
// steps, then the lexicographically smallest point sequence. Throws Infeasible
// when no admissible path exists. n_max defaults to |x2 - x1| + 2 window_ext.
HarnackPath optimize_path(const Kernel& k, std::int64_t x1, std::int64_t x2,
                          std::int64_t window_ext = 0,
                          std::optional<std::int64_t> n_max = std::nullopt);

enum class Regime { direct, unit, mixed };
std::string to_string(Regime r);

struct RegimeVerdict {
  Regime regime = Regime::mixed;
  // Samples (y, e(y)) of the elasticity e = y q'(y) / q(y), q = 1/k.
  std::vector<std::pair<double, double>> elasticity;
  double e_min = 0.0;
  double e_max = 0.0;
  bool q_convex = false;  // convexity of q checked on the sample grid
  std::string method;     // closed form, digamma, or numerical differentiation
};

// Regime of the optimal intermediate points over distances up to M. Refuses
// kernels that are not non-increasing or lack a smooth interpolant.
RegimeVerdict step_regime(const Kernel& k, std::int64_t M);

// exp(int_{t1}^{t2} phi + 2 S / (t2 - t1)). t1 = 0 requires phi integrable at 0.
double harnack_rhs(const RelaxationFunction& phi, double t1, double t2, const HarnackPath& path);
// The exponent of harnack_rhs, finite where the multiplier itself overflows.
double harnack_log_rhs(const RelaxationFunction& phi, double t1, double t2,
                       const HarnackPath& path);

struct HeatBoundParams {
  double c = 0.0;  // phi is the relaxation function of c * fhat(gamma, delta, M = 2/delta)
  double gamma = 2.0;
  double delta = 1.0;
  double nu = 1.0;
  double k1 = 1.0;  // k(1)
  double l1 = 1.0;  // |k|_1
};

struct HeatBounds {
  double lower = 0.0;
  double Lambda = 0.0;             // int_0^t phi, closed form
  double Lambda_quadrature = 0.0;  // same integral by quadrature
  double Lambda_small_t = 0.0;     // (t/delta)(1 - log(2^gamma c delta^{1-gamma} t)), valid for t <= t_*
  double t_star = 0.0;
  double c_t_nu = 0.0;
  double C0 = 0.0;  // max over the grid of phi(s) s^{1/(gamma-1)}
  double C0_grid_lo = 0.0, C0_grid_hi = 0.0;
  int C0_grid_points = 0;
  std::optional<double> upper;              // with 2/k(1) in the exponent
  std::optional<double> upper_l1_variant;   // with 2/|k|_1 in the exponent
  std::string note;
};

HeatBounds heat_bounds(double t, const HeatBoundParams& p, std::int64_t x_minus_y);

}  // namespace jumpcd
