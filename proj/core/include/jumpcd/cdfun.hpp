// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jumpcd/kernel.hpp"

namespace jumpcd {

// rho(lambda) = sum_j k(j) (H')^{-1}(lambda / k(j)), to absolute accuracy tol.
// Refuses kernels whose log-condition series diverges.
double rho_eval(const Kernel& k, double lambda, double tol = 1e-12);
// lambda >= 0 with |rho(lambda) - a| <= tol.
double rho_inverse(const Kernel& k, double a, double tol = 1e-10);

// Lagrange-optimal function G(a) = int_0^a rho^{-1}. Evaluation uses the
// identity G(rho(lambda)) = sum_j k(j)^2 H(v_j(lambda)), v_j = (H')^{-1}(lambda/k(j)),
// tabulated on log-spaced lambda knots and interpolated by quintic Hermite
// polynomials in a (G' = rho^{-1}, G'' = 1/rho'). Thread-safe.
class LagrangeG {
 public:
  explicit LagrangeG(Kernel k);

  const Kernel& kernel() const { return k_; }
  double l1() const { return l1_; }
  double entropy() const { return entropy_; }

  double rho(double lambda) const;
  double rho_prime(double lambda) const;
  double rho_inverse(double a) const;
  // sum_j k(j)^2 H(v_j(lambda)), equal to G(rho(lambda))
  double value_at_multiplier(double lambda) const;

  // Interpolated value (relative accuracy ~1e-10).
  double operator()(double a) const;
  // Root solve for rho^{-1}(a) followed by the identity above.
  double exact(double a) const;
  // Independent adaptive-Simpson quadrature of rho^{-1} on [0, a].
  double quadrature(double a, double rel_tol = 1e-8) const;

  // Large-argument law |k|_1 e^{(a - M(k))/|k|_1} / 2.
  double asymptotic(double a) const;

 private:
  struct Knot {
    double lambda, a, g, g2;  // g2 = G'' = 1 / rho'
  };
  void ensure_covers(double a) const;
  Knot make_knot(double lambda) const;

  Kernel k_;
  double l1_;
  double entropy_;
  std::shared_ptr<std::mutex> mu_;
  mutable std::vector<Knot> knots_;
};

enum class CDKind { power_gamma, fhat, lagrange, scaled };
std::string to_string(CDKind k);

struct CDSpec {
  std::string kind;                      // power_gamma | fhat | lagrange
  std::map<std::string, double> params;  // c, gamma, delta, M
};

// A CD-function F on [0, inf), optionally multiplied by a positive factor.
class CDFunction {
 public:
  static CDFunction power_gamma(double c, double gamma);
  // c e^{delta M} r^gamma on [0, M], c M^gamma e^{delta r} beyond; requires M >= 2/delta.
  static CDFunction fhat(double c, double gamma, double delta, double M);
  static CDFunction lagrange(const Kernel& k);

  CDFunction scaled(double factor) const;
  CDFunction unscaled() const { return CDFunction(impl_, 1.0); }

  double operator()(double r) const;

  // Kind of the underlying function (scaled when factor != 1).
  CDKind kind() const;
  CDKind base_kind() const;
  double factor() const { return factor_; }

  // Parameters of the base function (c, gamma, delta, M as applicable).
  const std::map<std::string, double>& params() const;
  std::optional<double> small_exponent() const;
  std::optional<double> growth_rate() const;
  bool integrable_at_infinity() const;
  std::string label() const;

  // Present for the lagrange kind.
  const LagrangeG* lagrange_g() const;

 private:
  struct Impl;
  CDFunction(std::shared_ptr<const Impl> impl, double factor)
      : impl_(std::move(impl)), factor_(factor) {}
  std::shared_ptr<const Impl> impl_;
  double factor_ = 1.0;
};

CDFunction make_cd(const CDSpec& spec, const std::optional<Kernel>& kernel = std::nullopt);
CDFunction lagrange_G(const Kernel& k);

struct ProfilePoint {
  std::int64_t j;
  double rate;
  double v;
};

struct ExtremalProfile {
  double a = 0.0;
  double multiplier = 0.0;  // rho_R^{-1}(a)
  std::vector<ProfilePoint> points;
  double constraint_sum = 0.0;  // sum k(j) v_j
  double energy = 0.0;          // sum k(j)^2 H(v_j)
};

// Minimiser of sum k^2 H(v) subject to sum k v = a for the kernel truncated to |j| <= radius.
ExtremalProfile extremal_profile(const Kernel& k, double a, std::int64_t radius);

inline constexpr double kGoldenBeta = 1.6180339887498948482;

enum class PowerCDKernel { power_kernel, fractional };

// Small-r exponent: (1 + 2 beta) / beta up to the golden ratio, (beta - eps) / (beta - eps - 1) beyond.
double power_cd_exponent(double beta, double eps);

struct PowerCDResult {
  CDFunction F;
  double gamma;
  double delta;
  double M;
  double c;
  double grid_ratio_min;  // inf over the grid of the certifying bound divided by fhat(c = 1)
  double grid_argmin;
};

// fhat-kind CD-function for power or fractional kernels. The prefactor is certified
// on a grid against G (and against |r|^gamma / d when d is given, required above the
// golden ratio).
PowerCDResult power_cd(double beta, double eps, PowerCDKernel which,
                       std::optional<double> d = std::nullopt);

enum class RelaxationKind { closed_form_fhat, numeric };

// phi with phi' = -F(phi) and phi(0+) = inf.
class RelaxationFunction {
 public:
  double operator()(double t) const;
  RelaxationKind kind() const;
  // Switch time of the closed form (fhat kind only).
  std::optional<double> t_star() const;
  // int_{t1}^{t2} phi; t1 = 0 allowed when integrable_at_zero().
  double integral(double t1, double t2) const;
  bool integrable_at_zero() const;
  const CDFunction& function() const;

  struct Impl;

 private:
  friend RelaxationFunction relaxation(const CDFunction& F);
  explicit RelaxationFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

RelaxationFunction relaxation(const CDFunction& F);

}  // namespace jumpcd
