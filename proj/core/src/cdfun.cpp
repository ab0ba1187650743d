// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/cdfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "jumpcd/errors.hpp"
#include "series.hpp"

namespace jumpcd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

double param(const std::map<std::string, double>& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw InvalidArgument("missing parameter '" + name + "'");
  return it->second;
}

}  // namespace

std::string to_string(CDKind k) {
  switch (k) {
    case CDKind::power_gamma: return "power_gamma";
    case CDKind::fhat: return "fhat";
    case CDKind::lagrange: return "lagrange";
    case CDKind::scaled: return "scaled";
  }
  return "unknown";
}

struct CDFunction::Impl {
  CDKind kind;
  std::map<std::string, double> params;
  std::optional<double> small_exponent;
  std::optional<double> growth_rate;
  std::string label;
  std::shared_ptr<const LagrangeG> lagrange;

  double eval(double r) const {
    switch (kind) {
      case CDKind::power_gamma: return params.at("c") * std::pow(r, params.at("gamma"));
      case CDKind::fhat: {
        const double c = params.at("c"), g = params.at("gamma"), d = params.at("delta"),
                     M = params.at("M");
        if (r <= M) return c * std::exp(d * M) * std::pow(r, g);
        return c * std::pow(M, g) * std::exp(d * r);
      }
      case CDKind::lagrange: return (*lagrange)(r);
      case CDKind::scaled: break;
    }
    throw InvalidArgument("CDFunction: invalid kind");
  }
};

CDFunction CDFunction::power_gamma(double c, double gamma) {
  require(std::isfinite(c) && c > 0.0, "power_gamma: c must be > 0");
  require(std::isfinite(gamma) && gamma >= 2.0, "power_gamma: gamma must be >= 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = CDKind::power_gamma;
  impl->params = {{"c", c}, {"gamma", gamma}};
  impl->small_exponent = gamma;
  impl->label = "power_gamma(c=" + fmt(c) + ", gamma=" + fmt(gamma) + ")";
  return CDFunction(impl, 1.0);
}

CDFunction CDFunction::fhat(double c, double gamma, double delta, double M) {
  require(std::isfinite(c) && c > 0.0, "fhat: c must be > 0");
  require(std::isfinite(gamma) && gamma >= 2.0, "fhat: gamma must be >= 2");
  require(std::isfinite(delta) && delta > 0.0, "fhat: delta must be > 0");
  require(std::isfinite(M) && M * delta >= 2.0 * (1.0 - 1e-12),
          "fhat: M must be >= 2/delta (got M=" + fmt(M) + ", 2/delta=" + fmt(2.0 / delta) + ")");
  auto impl = std::make_shared<Impl>();
  impl->kind = CDKind::fhat;
  impl->params = {{"c", c}, {"gamma", gamma}, {"delta", delta}, {"M", M}};
  impl->small_exponent = gamma;
  impl->growth_rate = delta;
  impl->label = "fhat(c=" + fmt(c) + ", gamma=" + fmt(gamma) + ", delta=" + fmt(delta) +
                ", M=" + fmt(M) + ")";
  return CDFunction(impl, 1.0);
}

CDFunction CDFunction::lagrange(const Kernel& k) {
  auto impl = std::make_shared<Impl>();
  impl->kind = CDKind::lagrange;
  impl->lagrange = std::make_shared<const LagrangeG>(k);
  impl->params = {{"l1", impl->lagrange->l1()}, {"M_k", impl->lagrange->entropy()}};
  const Family f = k.family();
  if (f == Family::power || f == Family::fractional) {
    const double beta = k.spec().params.at("beta");
    impl->small_exponent = (1.0 + 2.0 * beta) / beta;
  } else if (f == Family::finite) {
    impl->small_exponent = 2.0;
  }
  impl->growth_rate = 1.0 / impl->lagrange->l1();
  impl->label = "lagrange(" + k.label() + ")";
  return CDFunction(impl, 1.0);
}

CDFunction CDFunction::scaled(double factor) const {
  require(std::isfinite(factor) && factor > 0.0, "scaled: factor must be > 0");
  return CDFunction(impl_, factor_ * factor);
}

double CDFunction::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("CD-function evaluated at negative argument");
  if (r == 0.0) return 0.0;
  return factor_ * impl_->eval(r);
}

CDKind CDFunction::kind() const { return factor_ == 1.0 ? impl_->kind : CDKind::scaled; }
CDKind CDFunction::base_kind() const { return impl_->kind; }
const std::map<std::string, double>& CDFunction::params() const { return impl_->params; }
std::optional<double> CDFunction::small_exponent() const { return impl_->small_exponent; }
std::optional<double> CDFunction::growth_rate() const { return impl_->growth_rate; }
bool CDFunction::integrable_at_infinity() const { return true; }
const LagrangeG* CDFunction::lagrange_g() const { return impl_->lagrange.get(); }

std::string CDFunction::label() const {
  if (factor_ == 1.0) return impl_->label;
  return fmt(factor_) + " * " + impl_->label;
}

CDFunction make_cd(const CDSpec& spec, const std::optional<Kernel>& kernel) {
  CDFunction F = [&] {
    if (spec.kind == "power_gamma") {
      return CDFunction::power_gamma(param(spec.params, "c"), param(spec.params, "gamma"));
    }
    if (spec.kind == "fhat") {
      return CDFunction::fhat(param(spec.params, "c"), param(spec.params, "gamma"),
                              param(spec.params, "delta"), param(spec.params, "M"));
    }
    if (spec.kind == "lagrange") {
      if (!kernel) throw InvalidArgument("lagrange CD-function requires a kernel");
      return CDFunction::lagrange(*kernel);
    }
    throw InvalidArgument("unknown CD kind '" + spec.kind + "'");
  }();
  auto it = spec.params.find("factor");
  if (it != spec.params.end()) F = F.scaled(it->second);
  return F;
}

CDFunction lagrange_G(const Kernel& k) { return CDFunction::lagrange(k); }

double power_cd_exponent(double beta, double eps) {
  require(std::isfinite(beta) && beta > 0.0 && beta < 2.0, "power_cd: beta must lie in (0, 2)");
  if (beta <= kGoldenBeta) return (1.0 + 2.0 * beta) / beta;
  require(std::isfinite(eps) && eps > 0.0 && eps < beta - 1.0,
          "power_cd: eps must lie in (0, beta - 1)");
  return (beta - eps) / (beta - eps - 1.0);
}

PowerCDResult power_cd(double beta, double eps, PowerCDKernel which, std::optional<double> d) {
  const double gamma = power_cd_exponent(beta, eps);
  if (beta > kGoldenBeta && !d) {
    throw Refusal("power_cd: above the golden ratio the prefactor needs a certified d");
  }
  if (d) require(std::isfinite(*d) && *d > 0.0, "power_cd: d must be > 0");
  const Kernel k = which == PowerCDKernel::power_kernel ? Kernel::power(beta)
                                                        : Kernel::fractional(beta);
  const LagrangeG G(k);
  const double delta = 1.0 / G.l1();
  const double M = 2.0 / delta;
  const CDFunction unit = CDFunction::fhat(1.0, gamma, delta, M);
  double best = kInf, arg = 0.0;
  const int n = 400;
  const double lo = std::log(1e-6), hi = std::log(60.0 * G.l1());
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / n);
    double bound = G(r);
    if (d) bound = std::max(bound, std::pow(r, gamma) / *d);
    const double ratio = bound / unit(r);
    if (ratio < best) {
      best = ratio;
      arg = r;
    }
  }
  const double c = (1.0 - 1e-3) * best;
  return PowerCDResult{CDFunction::fhat(c, gamma, delta, M), gamma, delta, M, c, best, arg};
}

// ---------------------------------------------------------------------------
// Relaxation functions

struct RelaxationFunction::Impl {
  CDFunction F;
  explicit Impl(CDFunction f) : F(std::move(f)) {}
  virtual ~Impl() = default;
  virtual double eval(double t) const = 0;
  virtual double integral(double t1, double t2) const = 0;
  virtual RelaxationKind kind() const = 0;
  virtual std::optional<double> t_star() const { return std::nullopt; }
  virtual bool integrable_at_zero() const = 0;
};

namespace {

class ClosedFhat final : public RelaxationFunction::Impl {
 public:
  ClosedFhat(CDFunction f, double c, double gamma, double delta, double M)
      : Impl(std::move(f)), g_(gamma), d_(delta), M_(M) {
    A_ = c * delta * std::pow(M, gamma);
    ts_ = std::pow(M, -gamma) * std::exp(-delta * M) / (c * delta);
    B_ = c * (gamma - 1.0) * std::exp(delta * M);
    C_ = std::pow(M, -gamma) * (M - (gamma - 1.0) / delta);
    p_ = 1.0 / (gamma - 1.0);
  }
  double eval(double t) const override {
    if (!(t > 0.0)) throw DomainError("relaxation: t must be > 0");
    if (t <= ts_) return -std::log(A_ * t) / d_;
    return std::pow(B_ * t + C_, -p_);
  }
  double integral(double t1, double t2) const override {
    if (!(t1 >= 0.0) || !(t2 >= t1)) throw DomainError("relaxation integral: need 0 <= t1 <= t2");
    return antiderivative(t2) - antiderivative(t1);
  }
  RelaxationKind kind() const override { return RelaxationKind::closed_form_fhat; }
  std::optional<double> t_star() const override { return ts_; }
  bool integrable_at_zero() const override { return true; }

 private:
  double log_part(double t) const {
    if (t == 0.0) return 0.0;
    return t / d_ * (1.0 - std::log(A_ * t));
  }
  double power_part(double t) const {
    const double z = B_ * t + C_;
    if (std::fabs(g_ - 2.0) < 1e-12) return std::log(z) / B_;
    return std::pow(z, 1.0 - p_) / (B_ * (1.0 - p_));
  }
  double antiderivative(double t) const {
    if (t <= ts_) return log_part(t);
    return log_part(ts_) + power_part(t) - power_part(ts_);
  }
  double g_, d_, M_, A_, ts_, B_, C_, p_;
};

// phi = G_int^{-1} with G_int(x) = int_x^inf dr / F(r), tabulated on log-x panels.
class NumericRelax final : public RelaxationFunction::Impl {
 public:
  NumericRelax(CDFunction full, CDFunction base, double time_scale)
      : Impl(std::move(full)), base_(std::move(base)), s_(time_scale) {
    for (int i = -kPerDecade; i <= kPerDecade; ++i) x_.push_back(std::pow(10.0, double(i) / kPerDecade));
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) panel_.push_back(panel(x_[i], x_[i + 1]));
    rebuild();
  }
  double eval(double t) const override {
    if (!(t > 0.0)) throw DomainError("relaxation: t must be > 0");
    return invert(s_ * t);
  }
  double integral(double t1, double t2) const override {
    if (!(t1 >= 0.0) || !(t2 >= t1)) throw DomainError("relaxation integral: need 0 <= t1 <= t2");
    if (t1 == t2) return 0.0;
    if (t1 == 0.0 && !integrable_at_zero()) {
      throw DomainError("relaxation is not integrable at t = 0 for " + F.label());
    }
    // With x = phi(t): int phi dt = int x / F(x) dx over [phi(t2), phi(t1)].
    const double x2 = invert(s_ * t2);
    auto f = [this](double x) { return x / base_(x); };
    double head;
    if (t1 == 0.0) {
      head = detail::integrate_to_infinity(f, x2, 1e-14);
    } else {
      const double x1 = invert(s_ * t1);
      head = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double s) {
            const double x = std::exp(s);
            return x * f(x);
          },
          std::log(x2), std::log(x1), 20, 1e-14);
    }
    return head / s_;
  }
  RelaxationKind kind() const override { return RelaxationKind::numeric; }
  bool integrable_at_zero() const override {
    if (base_.growth_rate()) return true;
    return base_.base_kind() == CDKind::power_gamma && base_.params().at("gamma") > 2.0;
  }

 private:
  static constexpr int kPerDecade = 16;

  double panel(double a, double b) const {
    return boost::math::quadrature::gauss<double, 15>::integrate(
        [this](double s) {
          const double x = std::exp(s);
          return x / base_(x);
        },
        std::log(a), std::log(b));
  }
  void rebuild() const {
    tail_ = detail::integrate_to_infinity([this](double r) { return 1.0 / base_(r); }, x_.back(),
                                          1e-15);
    cum_.assign(x_.size(), 0.0);
    double acc = tail_;
    cum_.back() = acc;
    for (std::size_t i = x_.size() - 1; i-- > 0;) {
      acc += panel_[i];
      cum_[i] = acc;
    }
  }
  void ensure(double t) const {
    const double step = std::pow(10.0, 1.0 / kPerDecade);
    while (t > cum_.front()) {
      if (x_.front() < 1e-200) throw AccuracyFailure("relaxation: time beyond tabulated range");
      for (int i = 0; i < kPerDecade; ++i) {
        const double x = x_.front() / step;
        panel_.insert(panel_.begin(), panel(x, x_.front()));
        x_.insert(x_.begin(), x);
      }
      rebuild();
    }
    while (t < cum_.back()) {
      if (x_.back() > 1e12) throw AccuracyFailure("relaxation: time below tabulated range");
      for (int i = 0; i < kPerDecade; ++i) {
        const double x = x_.back() * step;
        panel_.push_back(panel(x_.back(), x));
        x_.push_back(x);
      }
      rebuild();
    }
  }
  double invert(double t) const {
    std::size_t i;
    double ci;
    {
      std::lock_guard<std::mutex> lock(mu_);
      ensure(t);
      // cum_ is decreasing: find i with cum_[i] >= t >= cum_[i+1]
      auto it = std::lower_bound(cum_.begin(), cum_.end(), t, std::greater<double>());
      i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cum_.begin() - 1));
      if (i + 1 >= x_.size()) i = x_.size() - 2;
      ci = cum_[i];
    }
    const double xa = x_[i], xb = x_[i + 1];
    auto g = [&](double x) { return ci - panel(xa, x) - t; };
    std::uintmax_t iters = 200;
    auto stop = [](double l, double r) { return r - l <= 1e-15 * r; };
    const double ga = ci - t, gb = g(xb);
    if (ga <= 0.0) return xa;
    if (gb >= 0.0) return xb;
    const auto res = boost::math::tools::toms748_solve(g, xa, xb, ga, gb, stop, iters);
    return 0.5 * (res.first + res.second);
  }

  CDFunction base_;
  double s_;
  mutable std::mutex mu_;
  mutable std::vector<double> x_, panel_, cum_;
  mutable double tail_ = 0.0;
};

}  // namespace

double RelaxationFunction::operator()(double t) const { return impl_->eval(t); }
RelaxationKind RelaxationFunction::kind() const { return impl_->kind(); }
std::optional<double> RelaxationFunction::t_star() const { return impl_->t_star(); }
double RelaxationFunction::integral(double t1, double t2) const {
  return impl_->integral(t1, t2);
}
bool RelaxationFunction::integrable_at_zero() const { return impl_->integrable_at_zero(); }
const CDFunction& RelaxationFunction::function() const { return impl_->F; }

RelaxationFunction relaxation(const CDFunction& F) {
  if (!F.integrable_at_infinity()) {
    throw InvalidArgument("relaxation: 1/F is not certified integrable at infinity");
  }
  if (F.base_kind() == CDKind::fhat) {
    const auto& p = F.params();
    return RelaxationFunction(std::make_shared<ClosedFhat>(
        F, F.factor() * p.at("c"), p.at("gamma"), p.at("delta"), p.at("M")));
  }
  // relax(s F)(t) = relax(F)(s t)
  const CDFunction base = F.unscaled();
  return RelaxationFunction(std::make_shared<NumericRelax>(F, base, F.factor()));
}

}  // namespace jumpcd
