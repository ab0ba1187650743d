// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "jumpcd/errors.hpp"
#include "jumpcd/upsilon.hpp"
#include "series.hpp"

namespace jumpcd {
namespace {

using detail::CompensatedSum;

double l1_within(const Kernel& k, double tol, double scale) {
  if (scale == 0.0) return k.l1();
  const double want = std::clamp(tol / scale, 1e-14, 1e-12);
  return k.aggregate(Selector::l1, 0.0, want).value;
}

// Rates k(o) for offsets o in [-O, O] with prefix sums for interval queries.
class OffsetTable {
 public:
  OffsetTable(const Kernel& k, std::int64_t O) : O_(O), rate_(2 * O + 1), prefix_(2 * O + 2, 0.0) {
    for (std::int64_t o = -O; o <= O; ++o) rate_[idx(o)] = k(o);
    for (std::size_t i = 0; i < rate_.size(); ++i) prefix_[i + 1] = prefix_[i] + rate_[i];
  }
  double operator()(std::int64_t o) const { return rate_[idx(o)]; }
  // sum_{o = lo}^{hi} k(o), empty when lo > hi
  double range(std::int64_t lo, std::int64_t hi) const {
    lo = std::max(lo, -O_);
    hi = std::min(hi, O_);
    if (lo > hi) return 0.0;
    return prefix_[idx(hi) + 1] - prefix_[idx(lo)];
  }

 private:
  std::size_t idx(std::int64_t o) const { return static_cast<std::size_t>(o + O_); }
  std::int64_t O_;
  std::vector<double> rate_;
  std::vector<double> prefix_;
};

}  // namespace

LatticeFunction::LatticeFunction(std::int64_t W, std::vector<double> values, double exterior)
    : W_(W), values_(std::move(values)), exterior_(exterior) {
  if (W < 0) throw InvalidArgument("LatticeFunction: window radius must be >= 0");
  if (values_.size() != static_cast<std::size_t>(2 * W + 1)) {
    throw InvalidArgument("LatticeFunction: expected 2W+1 values");
  }
  if (!std::isfinite(exterior_)) throw InvalidArgument("LatticeFunction: exterior must be finite");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("LatticeFunction: values must be finite");
  }
}

LatticeFunction LatticeFunction::constant(std::int64_t W, double c) {
  return LatticeFunction(W, std::vector<double>(static_cast<std::size_t>(2 * W + 1), c), c);
}

LatticeFunction LatticeFunction::indicator(std::int64_t W, std::int64_t x0) {
  if (x0 < -W || x0 > W) throw InvalidArgument("indicator: point outside window");
  std::vector<double> v(static_cast<std::size_t>(2 * W + 1), 0.0);
  v[static_cast<std::size_t>(x0 + W)] = 1.0;
  return LatticeFunction(W, std::move(v), 0.0);
}

double LatticeFunction::sup_abs() const {
  double s = std::fabs(exterior_);
  for (double v : values_) s = std::max(s, std::fabs(v));
  return s;
}

LatticeFunction LatticeFunction::recentred(std::int64_t x) const {
  const std::int64_t W2 = W_ + std::llabs(x);
  const double ux = (*this)(x);
  std::vector<double> v(static_cast<std::size_t>(2 * W2 + 1));
  for (std::int64_t y = -W2; y <= W2; ++y) v[static_cast<std::size_t>(y + W2)] = (*this)(x + y) - ux;
  return LatticeFunction(W2, std::move(v), exterior_ - ux);
}

LatticeFunction LatticeFunction::negated() const {
  std::vector<double> v(values_);
  for (double& a : v) a = -a;
  return LatticeFunction(W_, std::move(v), -exterior_);
}

LatticeFunction symmetrize(const LatticeFunction& u) {
  if (u(0) != 0.0) throw InvalidArgument("symmetrize: requires u(0) = 0");
  const std::int64_t W = u.window();
  std::vector<double> w(static_cast<std::size_t>(2 * W + 1));
  for (std::int64_t j = -W; j <= W; ++j) w[static_cast<std::size_t>(j + W)] = 0.5 * (u(j) + u(-j));
  return LatticeFunction(W, std::move(w), u.exterior());
}

double apply_L(const Kernel& k, const LatticeFunction& u, std::int64_t x, double tol) {
  const std::int64_t W = u.window();
  const double ux = u(x);
  CompensatedSum acc, inside;
  for (std::int64_t y = -W; y <= W; ++y) {
    const double r = k(y - x);
    if (r == 0.0) continue;
    acc.add(r * (u(y) - ux));
    inside.add(r);
  }
  const double d = u.exterior() - ux;
  if (d != 0.0) acc.add(d * (l1_within(k, tol, std::fabs(d)) - inside.value()));
  return acc.value();
}

double psi_upsilon(const Kernel& k, const LatticeFunction& u, std::int64_t x, double tol) {
  const std::int64_t W = u.window();
  const double ux = u(x);
  CompensatedSum acc, inside;
  for (std::int64_t y = -W; y <= W; ++y) {
    const double r = k(y - x);
    if (r == 0.0) continue;
    acc.add(r * upsilon(u(y) - ux));
    inside.add(r);
  }
  const double ue = upsilon(u.exterior() - ux);
  if (ue != 0.0) acc.add(ue * (l1_within(k, tol, ue) - inside.value()));
  return std::max(0.0, acc.value());
}

double apply_L_window(const Kernel& k, const LatticeFunction& u, std::int64_t x) {
  const std::int64_t W = u.window();
  const double ux = u(x);
  CompensatedSum acc;
  for (std::int64_t y = -W; y <= W; ++y) {
    const double r = k(y - x);
    if (r != 0.0) acc.add(r * (u(y) - ux));
  }
  return acc.value();
}

double psi_upsilon_window(const Kernel& k, const LatticeFunction& u, std::int64_t x) {
  const std::int64_t W = u.window();
  const double ux = u(x);
  CompensatedSum acc;
  for (std::int64_t y = -W; y <= W; ++y) {
    const double r = k(y - x);
    if (r != 0.0) acc.add(r * upsilon(u(y) - ux));
  }
  return acc.value();
}

// The double sum is split by which of p = x+l, q = x+j, r = x+j+l lie in the
// window I. Terms with at least two of them inside are enumerated; when two are
// outside the sum over the free index collapses to |k|_1 minus window sums or to
// the autoconvolution k*k, so no truncation radius is needed.
double psi2_upsilon(const Kernel& k, const LatticeFunction& u, std::int64_t x, double tol,
                    WeightSide side) {
  const std::int64_t W = u.window();
  const std::int64_t ax = std::llabs(x);
  const double ux = u(x);
  const double e = u.exterior() - ux;
  const OffsetTable kt(k, 3 * W + ax + 2);
  auto in = [W](std::int64_t y) { return y >= -W && y <= W; };
  auto d = [&](std::int64_t y) { return in(y) ? u(y) - ux : e; };
  auto omega = [side](double dp, double dq) { return std::exp(side == WeightSide::l ? dp : dq); };

  const double cap = std::max(1.0, std::exp(2.0 * u.sup_abs()) * upsilon(4.0 * u.sup_abs()));
  const double l1 = l1_within(k, tol, cap);

  // sum over y in I u (I - z + x) of k(y - x)
  auto union_mass = [&](std::int64_t z) {
    const std::int64_t a0 = -W - x, a1 = W - x;  // offsets of I
    const std::int64_t b0 = -W - z, b1 = W - z;  // offsets of I - z + x
    const double both = kt.range(std::max(a0, b0), std::min(a1, b1));
    return kt.range(a0, a1) + kt.range(b0, b1) - both;
  };
  auto m_out = [&](std::int64_t z) { return l1 - union_mass(z); };

  CompensatedSum T;
  for (std::int64_t p = -W; p <= W; ++p) {
    const double kp = kt(p - x);
    if (kp == 0.0) continue;
    const double dp = d(p);
    for (std::int64_t q = -W; q <= W; ++q) {
      const double kq = kt(q - x);
      if (kq == 0.0) continue;
      const double dq = d(q);
      T.add(kp * kq * omega(dp, dq) * upsilon(d(p + q - x) - dp - dq));
    }
    // q outside, r inside
    for (std::int64_t r = -W; r <= W; ++r) {
      const std::int64_t q = r + x - p;
      if (in(q)) continue;
      const double kq = kt(r - p);
      if (kq == 0.0) continue;
      T.add(kp * kq * omega(dp, e) * upsilon(d(r) - dp - e));
    }
    // q and r outside
    T.add(kp * omega(dp, e) * upsilon(-dp) * m_out(p));
  }
  for (std::int64_t q = -W; q <= W; ++q) {
    const double kq = kt(q - x);
    if (kq == 0.0) continue;
    const double dq = d(q);
    // p outside, r inside
    for (std::int64_t r = -W; r <= W; ++r) {
      const std::int64_t p = r + x - q;
      if (in(p)) continue;
      const double kp = kt(r - q);
      if (kp == 0.0) continue;
      T.add(kp * kq * omega(e, dq) * upsilon(d(r) - e - dq));
    }
    // p and r outside
    T.add(kq * omega(e, dq) * upsilon(-dq) * m_out(q));
  }
  // p and q outside
  const double wee = omega(e, e);
  CompensatedSum sum_c;
  for (std::int64_t r = -W; r <= W; ++r) {
    CompensatedSum c;
    c.add(k.autoconvolution(r - x));
    for (std::int64_t p = -W; p <= W; ++p) {
      c.add(-kt(p - x) * kt(r - p));
      if (!in(r + x - p)) c.add(-kt(r - p) * kt(p - x));
    }
    const double cr = std::max(0.0, c.value());
    sum_c.add(cr);
    T.add(wee * upsilon(d(r) - 2.0 * e) * cr);
  }
  const double outer = l1 - kt.range(-W - x, W - x);
  T.add(wee * upsilon(-e) * std::max(0.0, outer * outer - sum_c.value()));
  return std::max(0.0, 0.5 * T.value());
}

double basic_lower_bound(const Kernel& k, const LatticeFunction& u, double) {
  const LatticeFunction w = symmetrize(u);
  const std::int64_t W = u.window();
  CompensatedSum acc, inside;
  for (std::int64_t j = -W; j <= W; ++j) {
    const double r = k(j);
    if (r == 0.0) continue;
    acc.add(r * r * H_eval(-w(j)));
    inside.add(r * r);
  }
  const double he = H_eval(-u.exterior());
  if (he != 0.0) acc.add(he * std::max(0.0, k.l2_squared() - inside.value()));
  return acc.value();
}

}  // namespace jumpcd
