// SPDX-License-Identifier: Apache-2.0
#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace jumpcd::detail {

double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol,
                             double* error_estimate) {
  // The two-endpoint overload is non-const in this Boost version; one instance per thread.
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol,
                                        &err, &l1);
  if (error_estimate) *error_estimate = err;
  return v;
}

namespace {

// Integral over [a, inf) by Gauss-Kronrod on doubling panels, which resolves a
// plateau followed by slow decay. The remainder after 64 panels is integrated over
// s = log x = s_end e^v, where algebraic tails in x and in log x both decay
// exponentially; flog(s) = e^s f(e^s).
double integrate_panels(const std::function<double(double)>& f,
                        const std::function<double(double)>& flog, double a, double* err) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  CompensatedSum acc;
  double e_acc = 0.0;
  double x = a;
  double w = std::max(a, 1.0);
  int small = 0;
  for (int i = 0; i < 64; ++i) {
    double e = 0.0;
    const double v = GK::integrate(f, x, x + w, 0, 0.0, &e);
    acc.add(v);
    e_acc += e;
    x += w;
    w *= 2.0;
    small = std::fabs(v) <= 1e-18 * std::fabs(acc.value()) ? small + 1 : 0;
    if (small >= 3) {
      *err = e_acc + std::fabs(v);
      return acc.value();
    }
  }
  const double s_end = std::log(x);
  auto fv = [&flog, s_end](double v) {
    const double s = s_end * std::exp(v);
    return std::isfinite(s) ? s * flog(s) : 0.0;
  };
  double e = 0.0;
  acc.add(integrate_to_infinity(fv, 0.0, 1e-15, &e));
  *err = e_acc + e;
  return acc.value();
}

}  // namespace

SeriesResult sum_smooth(const std::function<double(std::int64_t)>& term,
                        const std::function<double(double, int)>& cont, int period, double tol,
                        std::int64_t r_min, std::int64_t r_max,
                        const std::function<double(double, int)>& cont_log) {
  const std::int64_t p = std::max(1, period);
  std::int64_t R = std::max<std::int64_t>(r_min, p);
  R = ((R + p - 1) / p) * p;

  CompensatedSum head;
  for (std::int64_t j = 1; j <= R; ++j) head.add(term(j));

  SeriesResult out;
  for (;;) {
    CompensatedSum tail;
    double width = 0.0;
    for (int r = 0; r < p; ++r) {
      const double h = static_cast<double>(p);
      const double x0 = static_cast<double>(R + (r == 0 ? p : r));
      auto g = [&cont, r](double x) { return cont(x, r); };
      auto glog = [&cont, &cont_log, r](double s) {
        if (cont_log) return cont_log(s, r);
        const double x = std::exp(s);
        return std::isfinite(x) ? x * cont(x, r) : 0.0;
      };
      double qerr = 0.0;
      const double i0 = integrate_panels(g, glog, x0, &qerr);
      const double ihalf = boost::math::quadrature::gauss<double, 20>::integrate(g, x0 - 0.5 * h, x0);
      const double g0 = g(x0);
      const double d = 0.5 * h;
      const double gm2 = g(x0 - 2.0 * d), gm1 = g(x0 - d), gp1 = g(x0 + d), gp2 = g(x0 + 2.0 * d);
      const double dg = (gp1 - gm1) / (2.0 * d);
      const double d3g = (gp2 - 2.0 * gp1 + 2.0 * gm1 - gm2) / (2.0 * d * d * d);
      double est = i0 / h + 0.5 * g0 - h * dg / 12.0;
      double e = 2.0 * std::fabs(h * h * h * d3g) / 720.0;
      if (std::fabs(h * dg) > std::fabs(g0)) {
        // not yet smooth on the lattice scale: only the trapezoid/midpoint bracket holds
        const double lower = i0 / h + 0.5 * g0;
        const double upper = (i0 + ihalf) / h;
        est = 0.5 * (lower + upper);
        e = std::fabs(upper - lower);
      }
      tail.add(est);
      width += e + qerr / h;
    }
    out.value = head.value() + tail.value();
    out.error = width;
    out.radius = R;
    // an absolute target below the rounding floor of the result is unattainable
    out.converged = width <= std::max(tol, 1e-14 * std::fabs(out.value));
    if (out.converged || R >= r_max) return out;
    const std::int64_t next = std::min<std::int64_t>(2 * R, ((r_max + p - 1) / p) * p);
    for (std::int64_t j = R + 1; j <= next; ++j) head.add(term(j));
    R = next;
  }
}

}  // namespace jumpcd::detail
