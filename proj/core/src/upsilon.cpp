// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/upsilon.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "jumpcd/errors.hpp"

namespace jumpcd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Taylor coefficients of e^x - 1 - x, starting at x^2.
constexpr int kUpsTerms = 24;
constexpr std::array<double, kUpsTerms> make_ups_coeffs() {
  std::array<double, kUpsTerms> c{};
  double f = 2.0;
  for (int i = 0; i < kUpsTerms; ++i) {
    c[i] = 1.0 / f;
    f *= static_cast<double>(i + 3);
  }
  return c;
}
constexpr auto kUpsCoeffs = make_ups_coeffs();

// Taylor coefficients of sinh(x) - x e^{-x}, starting at x^2:
// c_n = [n odd]/n! - (-1)^{n-1}/(n-1)!.
constexpr int kHTerms = 28;
constexpr std::array<double, kHTerms> make_h_coeffs() {
  std::array<double, kHTerms> c{};
  double fact_nm1 = 1.0;  // (n-1)! for n = 2
  for (int i = 0; i < kHTerms; ++i) {
    const int n = i + 2;
    const double fact_n = fact_nm1 * n;
    const double odd = (n % 2 == 1) ? 1.0 / fact_n : 0.0;
    const double sgn = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n-1}
    c[i] = odd - sgn / fact_nm1;
    fact_nm1 = fact_n;
  }
  return c;
}
constexpr auto kHCoeffs = make_h_coeffs();

template <std::size_t N>
double series_from_square(const std::array<double, N>& c, double x) {
  double acc = 0.0;
  for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
  return acc * x * x;
}

}  // namespace

double upsilon(double x) {
  if (std::isnan(x)) return x;
  if (std::fabs(x) < 0.5) return series_from_square(kUpsCoeffs, x);
  if (x > 709.0) return kInf;
  return std::expm1(x) - x;
}

double H_pair(double x, double y) {
  const double s = x + y;
  const double u = upsilon(s);
  if (u == 0.0) return 0.0;
  if (std::fabs(x) < 700.0 && std::isfinite(u)) return 0.5 * std::exp(-x) * u;
  // Large arguments: combine in log space to avoid inf * 0.
  const double log_u = std::isfinite(u) ? std::log(u) : s;
  return 0.5 * std::exp(log_u - x);
}

double H_eval(double x) {
  if (std::fabs(x) < 0.5) return series_from_square(kHCoeffs, x);
  if (x > 709.0) return kInf;
  if (x < -700.0) {
    // sinh(x) - x e^{-x} = e^{-x}(|x| - 1/2) + O(e^{x})
    return std::exp(-x + std::log(-x - 0.5));
  }
  return std::sinh(x) - x * std::exp(-x);
}

double H_prime(double x) {
  if (x > 709.0) return kInf;
  if (x < -700.0) return -kInf;
  return std::sinh(x) + x * std::exp(-x);
}

double H_second(double x) {
  if (std::fabs(x) > 700.0) return kInf;
  return std::cosh(x) + (1.0 - x) * std::exp(-x);
}

double H_prime_inv(double y) {
  if (std::isnan(y) || y < 0.0) throw DomainError("H_prime_inv: argument must be nonnegative");
  if (y == 0.0) return 0.0;
  if (std::isinf(y)) return kInf;

  const double log2y = std::log(2.0) + std::log(y);
  // H'(x) = e^x (1 - (1 - 2x) e^{-2x}) / 2 and the correction is below 1e-32 here
  if (log2y > 40.0) return log2y;
  double lo = 0.0;
  double hi = std::max(1.0, log2y + 2.0);
  double x = (y <= 1.0) ? 0.5 * y : log2y;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int it = 0; it < 200; ++it) {
    const double f = H_prime(x) - y;
    if (f == 0.0) return x;
    if (f > 0.0) hi = x; else lo = x;
    double next = x - f / H_second(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - x);
    x = next;
    if (step <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) break;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
  }
  return x;
}

namespace {

// Grid supremum of ratio(x) on +-[1e-8, x_max], polished between the grid
// neighbours of the positive-axis maximiser.
NuCertificate grid_supremum(double gamma, const std::function<double(double)>& ratio,
                            bool negative_axis) {
  if (!(gamma >= 2.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("nu_constant: gamma must be >= 2");
  }
  NuCertificate cert;
  // the ratios decay like x^gamma e^{-x} past x = gamma; this extent leaves the tail negligible
  cert.x_max = 8.0 * gamma + 60.0;
  const int n = 20000;
  cert.grid_points = negative_axis ? 2 * n : n;
  const double lmin = std::log(1e-8);
  const double lmax = std::log(cert.x_max);
  auto node = [&](int i) { return std::exp(lmin + (lmax - lmin) * i / (n - 1)); };

  double best = 0.0, arg = 0.0, best_neg = 0.0;
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    const double x = node(i);
    const double rp = ratio(x);
    if (rp > best) { best = rp; arg = x; best_i = i; }
    if (negative_axis) best_neg = std::max(best_neg, ratio(-x));
  }
  if (best_i > 0 && best_i < n - 1) {
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -ratio(x); },
                                                   node(best_i - 1), node(best_i + 1), 52);
    if (-r.second > best) { best = -r.second; arg = r.first; }
  }
  cert.supremum = std::max(best, best_neg);
  cert.argmax = arg;
  cert.negative_sup = best_neg;
  cert.nu = 1.05 * cert.supremum;
  return cert;
}

}  // namespace

NuCertificate nu_certificate(double gamma) {
  return grid_supremum(
      gamma, [gamma](double x) { return std::pow(std::fabs(x), gamma) / H_eval(x); }, true);
}

NuCertificate nu_pair_certificate(double gamma) {
  // H(x, y) increases in x >= 0, so the binding case is H(0, y) = Upsilon(y) / 2.
  return grid_supremum(
      gamma, [gamma](double y) { return 2.0 * std::pow(y, gamma) / upsilon(y); }, false);
}

double nu_constant(double gamma) { return nu_certificate(gamma).nu; }

}  // namespace jumpcd
