// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "jumpcd/errors.hpp"

namespace jumpcd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTie = 1e-13;

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::direct: return "direct";
    case Regime::unit: return "unit";
    case Regime::mixed: return "mixed";
  }
  return "unknown";
}

HarnackPath harnack_sum(const Kernel& k, const std::vector<std::int64_t>& points) {
  if (points.size() < 2) throw InvalidArgument("harnack_sum: need at least two points");
  std::set<std::int64_t> seen;
  HarnackPath p;
  p.points = points;
  double inv = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!seen.insert(points[i]).second) {
      throw InvalidArgument("harnack_sum: point " + std::to_string(points[i]) + " at index " +
                            std::to_string(i) + " repeats");
    }
    if (i == 0) continue;
    const double r = k(points[i] - points[i - 1]);
    if (!(r > 0.0)) {
      throw InvalidArgument("harnack_sum: zero rate on step " + std::to_string(i) + " (" +
                            std::to_string(points[i - 1]) + " -> " + std::to_string(points[i]) +
                            ")");
    }
    p.rates.push_back(r);
    inv += 1.0 / r;
  }
  p.S = static_cast<double>(p.rates.size()) * inv;
  return p;
}

HarnackPath optimize_path(const Kernel& k, std::int64_t x1, std::int64_t x2,
                          std::int64_t window_ext, std::optional<std::int64_t> n_max) {
  if (x1 == x2) throw InvalidArgument("optimize_path: endpoints must differ");
  if (window_ext < 0) throw InvalidArgument("optimize_path: window_ext must be >= 0");
  const std::int64_t lo = std::min(x1, x2) - window_ext;
  const std::int64_t hi = std::max(x1, x2) + window_ext;
  const std::int64_t L = hi - lo + 1;
  const std::int64_t N = n_max.value_or(std::llabs(x2 - x1) + 2 * window_ext);
  if (N < 1) throw InvalidArgument("optimize_path: n_max must be >= 1");

  std::vector<double> inv(static_cast<std::size_t>(L), kInf);
  for (std::int64_t d = 1; d < L; ++d) {
    const double r = k(d);
    if (r > 0.0) inv[static_cast<std::size_t>(d)] = 1.0 / r;
  }
  auto cost = [&](std::int64_t a, std::int64_t b) {
    return a == b ? kInf : inv[static_cast<std::size_t>(std::llabs(a - b))];
  };
  auto idx = [lo](std::int64_t y) { return static_cast<std::size_t>(y - lo); };

  // g[n][y]: least sum of 1/k over n-step walks from y to x2
  std::vector<std::vector<double>> g(static_cast<std::size_t>(N + 1),
                                     std::vector<double>(static_cast<std::size_t>(L), kInf));
  g[0][idx(x2)] = 0.0;
  std::int64_t best_n = 0;
  double best_S = kInf;
  for (std::int64_t n = 1; n <= N; ++n) {
    auto& cur = g[static_cast<std::size_t>(n)];
    const auto& prev = g[static_cast<std::size_t>(n - 1)];
    for (std::int64_t y = lo; y <= hi; ++y) {
      double m = kInf;
      for (std::int64_t z = lo; z <= hi; ++z) {
        const double pz = prev[idx(z)];
        if (pz == kInf) continue;
        m = std::min(m, cost(y, z) + pz);
      }
      cur[idx(y)] = m;
    }
    const double S = static_cast<double>(n) * cur[idx(x1)];
    if (S < best_S * (1.0 - kTie)) {
      best_S = S;
      best_n = n;
    }
  }
  if (best_S == kInf) {
    throw Infeasible("optimize_path: no admissible path from " + std::to_string(x1) + " to " +
                     std::to_string(x2) + " within the search interval");
  }
  std::vector<std::int64_t> pts{x1};
  std::int64_t y = x1;
  for (std::int64_t i = 1; i <= best_n; ++i) {
    const double target = g[static_cast<std::size_t>(best_n - i + 1)][idx(y)];
    const auto& rest = g[static_cast<std::size_t>(best_n - i)];
    std::int64_t next = hi + 1;
    for (std::int64_t z = lo; z <= hi; ++z) {
      const double c = cost(y, z) + rest[idx(z)];
      if (c <= target * (1.0 + kTie)) {
        next = z;
        break;
      }
    }
    if (next > hi) throw AccuracyFailure("optimize_path: reconstruction failed");
    pts.push_back(next);
    y = next;
  }
  // Removing a loop shortens the walk and lowers S, so an optimal walk is a path;
  // the loop removal below only guards against rounding ties.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = pts.size(); j-- > i + 1;) {
      if (pts[j] == pts[i]) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                  pts.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        break;
      }
    }
  }
  return harnack_sum(k, pts);
}

RegimeVerdict step_regime(const Kernel& k, std::int64_t M) {
  if (M < 1) throw InvalidArgument("step_regime: M must be >= 1");
  const ConditionReport cond = kernel_conditions(k, std::max<std::int64_t>(M + 1, 2));
  if (!cond.non_increasing) {
    throw Refusal("step_regime: kernel is not non-increasing (first increase at j=" +
                  std::to_string(cond.first_increase) + ")");
  }
  if (!k.has_smooth_extension() || k.period() != 1) {
    throw Refusal("step_regime: kernel has no single smooth interpolant of 1/k");
  }
  RegimeVerdict out;
  const auto spec = k.spec();
  std::function<double(double)> elasticity;
  switch (k.family()) {
    case Family::power: {
      const double beta = spec.params.at("beta");
      elasticity = [beta](double) { return 1.0 + beta; };
      out.method = "closed form 1 + beta";
      break;
    }
    case Family::fractional: {
      const double beta = spec.params.at("beta");
      elasticity = [beta](double y) {
        return y * (boost::math::digamma(y + 1.0 + 0.5 * beta) -
                    boost::math::digamma(y - 0.5 * beta));
      };
      out.method = "digamma difference";
      break;
    }
    case Family::exponential: {
      const double alpha = spec.params.at("alpha");
      elasticity = [alpha](double y) { return alpha * y; };
      out.method = "closed form alpha y";
      break;
    }
    default:
      elasticity = [&k](double y) {
        const double h = 1e-4 * y;
        return -y * (k.log_continuous(y + h, 0) - k.log_continuous(y - h, 0)) / (2.0 * h);
      };
      out.method = "centred difference of log k";
      break;
  }
  const int n = 400;
  out.e_min = kInf;
  out.e_max = -kInf;
  std::vector<double> logq;
  for (int i = 0; i <= n; ++i) {
    const double y = 1.0 + (static_cast<double>(M) - 1.0) * i / n;
    const double e = elasticity(y);
    out.elasticity.emplace_back(y, e);
    out.e_min = std::min(out.e_min, e);
    out.e_max = std::max(out.e_max, e);
    logq.push_back(-k.log_continuous(y, 0));
  }
  out.q_convex = true;
  for (std::size_t i = 1; i + 1 < logq.size(); ++i) {
    const double q0 = std::exp(logq[i - 1]), q1 = std::exp(logq[i]), q2 = std::exp(logq[i + 1]);
    if (q0 - 2.0 * q1 + q2 < -1e-12 * q1) out.q_convex = false;
  }
  if (out.e_max <= 2.0 + 1e-12) {
    out.regime = Regime::direct;
  } else if (out.e_min >= 2.0 - 1e-12) {
    out.regime = Regime::unit;
  } else {
    out.regime = Regime::mixed;
  }
  return out;
}

double harnack_rhs(const RelaxationFunction& phi, double t1, double t2, const HarnackPath& path) {
  return std::exp(harnack_log_rhs(phi, t1, t2, path));
}

double harnack_log_rhs(const RelaxationFunction& phi, double t1, double t2,
                       const HarnackPath& path) {
  if (!(t1 >= 0.0) || !(t2 > t1) || !std::isfinite(t2)) {
    throw InvalidArgument("harnack_rhs: need 0 <= t1 < t2");
  }
  if (t1 == 0.0 && !phi.integrable_at_zero()) {
    throw DomainError("harnack_rhs: t1 = 0 needs a relaxation function integrable at 0");
  }
  return phi.integral(t1, t2) + 2.0 * path.S / (t2 - t1);
}

HeatBounds heat_bounds(double t, const HeatBoundParams& p, std::int64_t x_minus_y) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("heat_bounds: t must be > 0");
  if (!(p.gamma >= 2.0)) throw InvalidArgument("heat_bounds: gamma must be >= 2");
  if (!(p.c > 0.0) || !(p.delta > 0.0) || !(p.nu >= 0.0) || !(p.k1 > 0.0) || !(p.l1 > 0.0)) {
    throw InvalidArgument("heat_bounds: c, delta, k(1), |k|_1 must be > 0 and nu >= 0");
  }
  const double M = 2.0 / p.delta;
  const RelaxationFunction phi = relaxation(CDFunction::fhat(p.c, p.gamma, p.delta, M));
  HeatBounds b;
  b.t_star = *phi.t_star();
  b.Lambda = phi.integral(0.0, t);
  b.Lambda_small_t = t / p.delta *
                     (1.0 - std::log(std::pow(2.0, p.gamma) * p.c *
                                     std::pow(p.delta, 1.0 - p.gamma) * t));
  {
    const double split = std::min(t, b.t_star);
    boost::math::quadrature::tanh_sinh<double> ts;
    double q = ts.integrate([&](double s) { return phi(s); }, 0.0, split, 1e-13);
    if (t > split) {
      q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double s) { return phi(s); }, split, t, 30, 1e-13);
    }
    b.Lambda_quadrature = q;
  }
  const double d = static_cast<double>(x_minus_y);
  b.lower = std::exp(-(b.Lambda + 2.0 * d * d / (p.k1 * t)));

  if (p.gamma == 2.0) {
    b.c_t_nu = std::exp(p.nu) * t;
  } else {
    const double a = (p.gamma - 2.0) / (p.gamma - 1.0);
    b.c_t_nu = std::pow(a * p.nu + std::pow(t, a), 1.0 / a);
  }

  const double pw = 1.0 / (p.gamma - 1.0);
  b.C0_grid_lo = 1e-12 * b.t_star;
  b.C0_grid_hi = 1e12 * b.t_star;
  b.C0_grid_points = 4001;
  for (int i = 0; i < b.C0_grid_points; ++i) {
    const double s = b.C0_grid_lo * std::pow(b.C0_grid_hi / b.C0_grid_lo,
                                             static_cast<double>(i) / (b.C0_grid_points - 1));
    b.C0 = std::max(b.C0, phi(s) * std::pow(s, pw));
  }

  const double gap = b.c_t_nu - t;
  const double fl = gap > 0.0 ? std::floor(std::sqrt(gap)) : 0.0;
  if (fl >= 1.0) {
    b.upper = std::exp(b.C0 * p.nu + 2.0 / p.k1) / (2.0 * fl);
    b.upper_l1_variant = std::exp(b.C0 * p.nu + 2.0 / p.l1) / (2.0 * fl);
    b.note = "upper bound uses 2/k(1) in the exponent; 2/|k|_1 variant reported alongside";
  } else {
    b.note = "upper bound undefined: floor(sqrt(c(t,nu) - t)) = 0";
  }
  return b;
}

}  // namespace jumpcd
