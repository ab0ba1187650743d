// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/errors.hpp"
#include "jumpcd/upsilon.hpp"
#include "series.hpp"

namespace jumpcd {
namespace {

constexpr double kLog2 = 0.69314718055994530942;
constexpr int kKnotsPerDecade = 16;
// Below this multiplier the sums lose accuracy; G continues as a power law.
constexpr double kLambdaFloor = 1e-40;
constexpr double kLambdaCeil = 1e300;
constexpr double kRelTol = 1e-12;

// v = (H')^{-1}(lambda / k) from log k, stable when lambda / k overflows.
double profile_value(double log_lambda, double lk) {
  const double ly = log_lambda - lk;
  if (ly > 700.0) return kLog2 + ly;
  return H_prime_inv(std::exp(ly));
}

void require_log_condition(const Kernel& k) {
  if (!k.converges(Selector::log_condition_sum, 0.0)) {
    throw Refusal("kernel " + k.label() +
                  " fails the logarithmic summability condition; rho and G are undefined");
  }
}

double partial_scale(const Kernel& k, const std::function<double(double, double)>& f) {
  double s = 0.0;
  for (std::int64_t j = 1; j <= 64; ++j) {
    const double r = k(j);
    if (r > 0.0) s += 2.0 * r * f(std::log(r), static_cast<double>(j));
  }
  return std::max(s, 1e-300);
}

double rho_sum(const Kernel& k, double lambda, double tol, double* err) {
  if (lambda == 0.0) return 0.0;
  const double ll = std::log(lambda);
  auto f = [ll](double lk, double) { return profile_value(ll, lk); };
  if (tol <= 0.0) tol = kRelTol * partial_scale(k, f);
  const Aggregate a = k.weighted_sum(f, tol);
  if (err) *err = a.error;
  return a.value;
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t iters = 200;
  auto stop = [](double l, double r) { return r - l <= 4e-16 * std::max(std::fabs(r), 1e-300); };
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  const auto res = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  return std::fabs(f(res.first)) <= std::fabs(f(res.second)) ? res.first : res.second;
}

}  // namespace

double rho_eval(const Kernel& k, double lambda, double tol) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("rho: lambda must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("rho: tol must be > 0");
  require_log_condition(k);
  double err = 0.0;
  const double v = rho_sum(k, lambda, tol, &err);
  if (err > tol) {
    throw AccuracyFailure("rho: reached error " + std::to_string(err) + " > tol " +
                          std::to_string(tol));
  }
  return v;
}

double rho_inverse(const Kernel& k, double a, double tol) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("rho_inverse: a must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("rho_inverse: tol must be > 0");
  require_log_condition(k);
  if (a == 0.0) return 0.0;
  const double l1 = k.l1();
  const double M = k.entropy();
  const double sum_tol = 0.1 * tol;
  auto g = [&](double lambda) { return rho_sum(k, lambda, sum_tol, nullptr) - a; };
  double hi = std::min(kLambdaCeil, std::max(1e-300, 2.0 * std::exp((a - M) / l1)));
  while (g(hi) < 0.0) {
    if (hi >= kLambdaCeil) throw AccuracyFailure("rho_inverse: a beyond representable range");
    hi = std::min(kLambdaCeil, hi * 4.0);
  }
  double lo = hi;
  do {
    lo *= 0.25;
  } while (lo > 1e-300 && g(lo) > 0.0);
  if (lo <= 1e-300) lo = 0.0;
  const double lambda = bracketed_root(g, lo, hi);
  const double resid = std::fabs(g(lambda));
  if (resid > tol) {
    throw AccuracyFailure("rho_inverse: residual " + std::to_string(resid) + " > tol " +
                          std::to_string(tol));
  }
  return lambda;
}

LagrangeG::LagrangeG(Kernel k)
    : k_(std::move(k)), l1_(0.0), entropy_(0.0), mu_(std::make_shared<std::mutex>()) {
  require_log_condition(k_);
  l1_ = k_.l1();
  entropy_ = k_.entropy();
  for (int i = -kKnotsPerDecade; i <= kKnotsPerDecade; ++i) {
    knots_.push_back(make_knot(std::pow(10.0, static_cast<double>(i) / kKnotsPerDecade)));
  }
}

double LagrangeG::rho(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("rho: lambda must be >= 0");
  return rho_sum(k_, lambda, 0.0, nullptr);
}

double LagrangeG::rho_prime(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("rho': lambda must be > 0");
  const double ll = std::log(lambda);
  auto f = [ll, lambda](double lk, double) {
    const double v = profile_value(ll, lk);
    if (v > 30.0) return 1.0 / lambda;
    return std::exp(-lk) / H_second(v);
  };
  return k_.weighted_sum(f, kRelTol * partial_scale(k_, f)).value;
}

double LagrangeG::value_at_multiplier(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("G: multiplier must be >= 0");
  if (lambda == 0.0) return 0.0;
  const double ll = std::log(lambda);
  auto f = [ll](double lk, double) {
    const double v = profile_value(ll, lk);
    if (v > 30.0) return std::exp(lk + v - kLog2);
    return std::exp(lk) * H_eval(v);
  };
  return k_.weighted_sum(f, kRelTol * partial_scale(k_, f)).value;
}

LagrangeG::Knot LagrangeG::make_knot(double lambda) const {
  return Knot{lambda, rho(lambda), value_at_multiplier(lambda), 1.0 / rho_prime(lambda)};
}

void LagrangeG::ensure_covers(double a) const {
  const double step = std::pow(10.0, 1.0 / kKnotsPerDecade);
  auto exponent = [](const Knot& k) { return k.a * k.lambda / k.g; };
  auto settled = [&] {
    return std::fabs(exponent(knots_.front()) / exponent(knots_[kKnotsPerDecade]) - 1.0) < 1e-10;
  };
  while (a < knots_.front().a && knots_.front().lambda > kLambdaFloor && !settled()) {
    std::vector<Knot> below;
    double lam = knots_.front().lambda;
    for (int i = 0; i < kKnotsPerDecade; ++i) {
      lam /= step;
      below.push_back(make_knot(lam));
    }
    std::reverse(below.begin(), below.end());
    knots_.insert(knots_.begin(), below.begin(), below.end());
  }
  while (a > knots_.back().a && knots_.back().lambda < kLambdaCeil) {
    double lam = knots_.back().lambda;
    for (int i = 0; i < kKnotsPerDecade; ++i) {
      lam *= step;
      knots_.push_back(make_knot(lam));
    }
  }
}

double LagrangeG::operator()(double a) const {
  if (!(a >= 0.0)) throw DomainError("G: argument must be >= 0");
  if (a == 0.0) return 0.0;
  std::lock_guard<std::mutex> lock(*mu_);
  ensure_covers(a);
  const Knot& lo = knots_.front();
  if (a < lo.a) {
    // power law with the local exponent a G'/G, settled or at the accuracy floor
    return lo.g * std::pow(a / lo.a, lo.a * lo.lambda / lo.g);
  }
  if (a > knots_.back().a) return std::numeric_limits<double>::infinity();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), a,
                             [](double x, const Knot& k) { return x < k.a; });
  if (it == knots_.end()) --it;
  const Knot& k1 = *it;
  const Knot& k0 = *(it - 1);
  const double h = k1.a - k0.a;
  const double t = (a - k0.a) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double b0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double b1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double b2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double b3 = 0.5 * (t3 - 2.0 * t4 + t5);
  const double b4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double b5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return k0.g * b0 + h * k0.lambda * b1 + h * h * k0.g2 * b2 + h * h * k1.g2 * b3 +
         h * k1.lambda * b4 + k1.g * b5;
}

double LagrangeG::rho_inverse(double a) const {
  if (!(a >= 0.0)) throw DomainError("rho_inverse: a must be >= 0");
  if (a == 0.0) return 0.0;
  double lo = 0.0, hi = 0.0;
  {
    std::lock_guard<std::mutex> lock(*mu_);
    ensure_covers(a);
    if (a > knots_.back().a) throw AccuracyFailure("rho_inverse: a beyond representable range");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), a,
                               [](double x, const Knot& k) { return x < k.a; });
    if (it == knots_.begin()) {
      hi = it->lambda;
    } else {
      if (it == knots_.end()) --it;
      lo = (it - 1)->lambda;
      hi = it->lambda;
    }
  }
  return bracketed_root([&](double l) { return rho(l) - a; }, lo, hi);
}

double LagrangeG::exact(double a) const {
  if (!(a >= 0.0)) throw DomainError("G: argument must be >= 0");
  return value_at_multiplier(rho_inverse(a));
}

double LagrangeG::quadrature(double a, double rel_tol) const {
  if (!(a >= 0.0)) throw DomainError("G: argument must be >= 0");
  if (a == 0.0) return 0.0;
  auto f = [this](double s) { return rho_inverse(s); };
  std::function<double(double, double, double, double, double, double, double, int)> simpson =
      [&](double x0, double x1, double f0, double fm, double f1, double whole, double eps,
          int depth) -> double {
    const double xm = 0.5 * (x0 + x1);
    const double fl = f(0.5 * (x0 + xm)), fr = f(0.5 * (xm + x1));
    const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + fm);
    const double right = (x1 - xm) / 6.0 * (fm + 4.0 * fr + f1);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson(x0, xm, f0, fl, fm, left, 0.5 * eps, depth - 1) +
           simpson(xm, x1, fm, fr, f1, right, 0.5 * eps, depth - 1);
  };
  const double f0 = 0.0, fm = f(0.5 * a), f1 = f(a);
  const double whole = a / 6.0 * (f0 + 4.0 * fm + f1);
  const double scale = std::max(a * f1 * 0.25, 1e-300);
  return simpson(0.0, a, f0, fm, f1, whole, std::max(rel_tol * scale, 1e-14), 40);
}

double LagrangeG::asymptotic(double a) const {
  return 0.5 * l1_ * std::exp((a - entropy_) / l1_);
}

ExtremalProfile extremal_profile(const Kernel& k, double a, std::int64_t radius) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("extremal_profile: a must be > 0");
  if (radius < 1) throw InvalidArgument("extremal_profile: radius must be >= 1");
  const Kernel kr = k.truncated(radius);
  ExtremalProfile out;
  out.a = a;
  out.multiplier = rho_inverse(kr, a, 1e-12 * std::max(1.0, a));
  const double ll = std::log(out.multiplier);
  detail::CompensatedSum cons, energy;
  for (std::int64_t j = -radius; j <= radius; ++j) {
    const double r = kr(j);
    if (r <= 0.0) continue;
    const double v = profile_value(ll, std::log(r));
    out.points.push_back({j, r, v});
    cons.add(r * v);
    energy.add(r * r * H_eval(v));
  }
  out.constraint_sum = cons.value();
  out.energy = energy.value();
  return out;
}

}  // namespace jumpcd
