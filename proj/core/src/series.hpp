// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace jumpcd::detail {

struct SeriesResult {
  double value = 0.0;
  double error = 0.0;
  std::int64_t radius = 0;
  bool converged = false;
};

// Sum_{j >= 1} term(j) where, along each residue class r mod `period`, term(j)
// equals cont(j, r) for a smooth function that is eventually convex and decreasing.
// Terms up to a radius R are added explicitly; the remainder is the
// Euler-Maclaurin estimate from the continuous extension with its error taken as
// twice the first omitted correction (the trapezoid/midpoint bracket while the
// extension still varies on the lattice scale). R doubles from r_min until the error is below tol or R exceeds r_max.
// The optional cont_log(s, r) = x cont(x, r) at x = e^s carries the far tail past the
// double range of x, which matters for logarithmically decaying terms.
SeriesResult sum_smooth(const std::function<double(std::int64_t)>& term,
                        const std::function<double(double, int)>& cont, int period,
                        double tol, std::int64_t r_min, std::int64_t r_max,
                        const std::function<double(double, int)>& cont_log = {});

// Integral of f over [a, inf) by double-exponential quadrature.
double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol,
                             double* error_estimate = nullptr);

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) { add(x); return *this; }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace jumpcd::detail
