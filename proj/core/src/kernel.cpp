// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "jumpcd/errors.hpp"
#include "kernel_model.hpp"
#include "series.hpp"

namespace jumpcd {
namespace detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMinRadius = 512;
constexpr std::int64_t kMaxRadius = std::int64_t{1} << 22;

std::string fmt_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double lgam(double x) { return boost::math::lgamma(x); }

// log(Gamma(x + a) / Gamma(x + b)) without the cancellation of two large log-Gamma values:
// the Boost ratio routine at moderate x, the Bernoulli-polynomial expansion beyond.
double log_gamma_ratio(double x, double a, double b) {
  if (x < 1e6) return std::log(boost::math::tgamma_delta_ratio(x + a, b - a));
  auto B2 = [](double t) { return t * t - t + 1.0 / 6.0; };
  auto B3 = [](double t) { return t * t * t - 1.5 * t * t + 0.5 * t; };
  auto B4 = [](double t) { return t * t * t * t - 2.0 * t * t * t + t * t - 1.0 / 30.0; };
  const double z = 1.0 / x;
  return (a - b) * std::log(x) + (B2(a) - B2(b)) * z / 2.0 - (B3(a) - B3(b)) * z * z / 6.0 +
         (B4(a) - B4(b)) * z * z * z / 12.0;
}

// Power-law decay k(j) ~ C j^{-p}: convergence of each selector.
bool power_law_converges(double p, Selector s, double param) {
  switch (s) {
    case Selector::l1: return true;
    case Selector::moment: return param < p - 1.0;
    case Selector::frac_moment: return (1.0 - param) * p > 1.0;
    case Selector::entropy_M:
    case Selector::log_condition_sum: return true;
  }
  return false;
}

class PowerModel final : public KernelModel {
 public:
  explicit PowerModel(double beta) : beta_(beta) {}
  Family family() const override { return Family::power; }
  std::string label() const override { return "power(beta=" + fmt_param(beta_) + ")"; }
  KernelSpec spec() const override { return {"power", {{"beta", beta_}}, {}}; }
  double at(std::int64_t j) const override {
    return std::pow(static_cast<double>(j), -1.0 - beta_);
  }
  double log_cont(double x, int) const override { return -(1.0 + beta_) * std::log(x); }
  double log_xk_at_log(double s, int) const override { return -beta_ * s; }
  double tail_bound(std::int64_t R) const override {
    if (R < 1) return 2.0 * (1.0 + 1.0 / beta_);
    return 2.0 * std::pow(static_cast<double>(R), -beta_) / beta_;
  }
  bool converges(Selector s, double p) const override {
    return power_law_converges(1.0 + beta_, s, p);
  }

 private:
  double beta_;
};

class FractionalModel final : public KernelModel {
 public:
  explicit FractionalModel(double beta) : beta_(beta) {
    log_c_ = 0.5 * beta_ * std::log(4.0) + lgam(0.5 * (1.0 + beta_)) - 0.5 * std::log(std::numbers::pi) -
             lgam(-0.5 * beta_);  // boost returns log|Gamma| for negative arguments
    double sup = std::exp(log_c_);  // limit of k(j) j^{1+beta}
    for (int j = 1; j <= 64; ++j) sup = std::max(sup, at(j) * std::pow(j, 1.0 + beta_));
    ratio_bound_ = 1.1 * sup;
  }
  Family family() const override { return Family::fractional; }
  std::string label() const override { return "fractional(beta=" + fmt_param(beta_) + ")"; }
  KernelSpec spec() const override { return {"fractional", {{"beta", beta_}}, {}}; }
  double at(std::int64_t j) const override { return std::exp(log_cont(static_cast<double>(j), 0)); }
  double log_cont(double x, int) const override {
    return log_c_ + log_gamma_ratio(x, -0.5 * beta_, 1.0 + 0.5 * beta_);
  }
  double tail_bound(std::int64_t R) const override {
    if (R < 1) return 2.0 * ratio_bound_ * (1.0 + 1.0 / beta_);
    return ratio_bound_ * 2.0 * std::pow(static_cast<double>(R), -beta_) / beta_;
  }
  bool converges(Selector s, double p) const override {
    return power_law_converges(1.0 + beta_, s, p);
  }
  double ratio_bound() const { return ratio_bound_; }

 private:
  double beta_;
  double log_c_ = 0.0;
  double ratio_bound_ = 0.0;
};

class ExponentialModel final : public KernelModel {
 public:
  explicit ExponentialModel(double alpha) : alpha_(alpha) {}
  Family family() const override { return Family::exponential; }
  std::string label() const override { return "exponential(alpha=" + fmt_param(alpha_) + ")"; }
  KernelSpec spec() const override { return {"exponential", {{"alpha", alpha_}}, {}}; }
  double at(std::int64_t j) const override { return std::exp(-alpha_ * static_cast<double>(j)); }
  double log_cont(double x, int) const override { return -alpha_ * x; }
  double tail_bound(std::int64_t R) const override {
    const double r = static_cast<double>(std::max<std::int64_t>(R, 0));
    return 2.0 * std::exp(-alpha_ * (r + 1.0)) / (-std::expm1(-alpha_));
  }
  bool converges(Selector, double) const override { return true; }
  Aggregate half_sum(const Factor& f, double tol) const override {
    // Geometric decay: explicit summation until the remaining terms are negligible.
    CompensatedSum acc;
    std::int64_t j = 1;
    double last = kInf;
    for (; j < kMaxRadius; ++j) {
      const double lk = -alpha_ * static_cast<double>(j);
      const double t = std::exp(lk) * f(lk, static_cast<double>(j));
      acc.add(t);
      // Terms eventually decrease geometrically; stop once they are far below tol.
      if (j > 8 && std::fabs(t) < 1e-3 * tol && std::fabs(t) <= last) break;
      last = std::fabs(t);
    }
    Aggregate a;
    a.value = acc.value();
    a.error = 1e-3 * tol / (-std::expm1(-alpha_));
    a.radius = j;
    a.note = "explicit summation, geometric tail";
    return a;
  }

 private:
  double alpha_;
};

class FiniteModel final : public KernelModel {
 public:
  explicit FiniteModel(std::vector<double> v) : values_(std::move(v)) {
    radius_ = 0;
    bool gap = false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] > 0.0) radius_ = static_cast<std::int64_t>(i + 1);
    }
    for (std::int64_t i = 0; i < radius_; ++i) gap = gap || values_[i] == 0.0;
    kind_ = gap ? SupportKind::pattern : SupportKind::finite;
    values_.resize(radius_);
    suffix_.assign(values_.size() + 1, 0.0);
    for (std::size_t i = values_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + values_[i];
  }
  Family family() const override { return Family::finite; }
  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "finite([";
    for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? "," : "") << values_[i];
    os << "])";
    return os.str();
  }
  KernelSpec spec() const override { return {"finite", {}, values_}; }
  double at(std::int64_t j) const override {
    return j <= radius_ ? values_[static_cast<std::size_t>(j - 1)] : 0.0;
  }
  bool smooth() const override { return false; }
  Support support() const override { return {kind_, radius_}; }
  double tail_bound(std::int64_t R) const override {
    if (R >= radius_) return 0.0;
    return 2.0 * suffix_[static_cast<std::size_t>(std::max<std::int64_t>(R, 0))];
  }
  bool converges(Selector, double) const override { return true; }
  Aggregate half_sum(const Factor& f, double) const override {
    CompensatedSum acc;
    for (std::int64_t j = 1; j <= radius_; ++j) {
      const double v = values_[static_cast<std::size_t>(j - 1)];
      if (v > 0.0) acc.add(v * f(std::log(v), static_cast<double>(j)));
    }
    Aggregate a;
    a.value = acc.value();
    a.radius = radius_;
    a.note = "exact finite sum";
    return a;
  }

 private:
  std::vector<double> values_;
  std::vector<double> suffix_;
  std::int64_t radius_ = 0;
  SupportKind kind_ = SupportKind::finite;
};

class LogModel final : public KernelModel {
 public:
  explicit LogModel(double alpha) : alpha_(alpha) {}
  Family family() const override { return Family::log; }
  std::string label() const override { return "log(alpha=" + fmt_param(alpha_) + ")"; }
  KernelSpec spec() const override { return {"log", {{"alpha", alpha_}}, {}}; }
  double at(std::int64_t j) const override { return std::exp(log_cont(static_cast<double>(j), 0)); }
  double log_cont(double x, int) const override {
    return -std::log(x) - (1.0 + alpha_) * std::log(std::log1p(x));
  }
  double log_xk_at_log(double s, int) const override {
    // log(1 + e^s) = s + log1p(e^{-s})
    const double l = s > 30.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    return -(1.0 + alpha_) * std::log(l);
  }
  double tail_bound(std::int64_t R) const override {
    // k(x) <= 1/(x log(x)^{1+alpha}), whose integral from R >= 2 is log(R)^{-alpha}/alpha.
    double head = 0.0;
    std::int64_t r = std::max<std::int64_t>(R, 0);
    for (; r < 2; ++r) head += at(r + 1);
    return 2.0 * (head + std::pow(std::log(static_cast<double>(r)), -alpha_) / alpha_);
  }
  bool converges(Selector s, double p) const override {
    switch (s) {
      case Selector::l1: return true;
      case Selector::moment: return p <= 0.0;
      case Selector::frac_moment: return p <= 0.0;
      case Selector::entropy_M:
      case Selector::log_condition_sum: return alpha_ > 1.0;
    }
    return false;
  }

 private:
  double alpha_;
};

// k(j) = klog(m!) for m! <= |j| < (m+1)!, klog(x) = 1/(x log(1+x)^{1+alpha}).
class PlateauModel final : public KernelModel {
 public:
  explicit PlateauModel(double alpha) : alpha_(alpha) {}
  Family family() const override { return Family::factorial_plateau; }
  std::string label() const override {
    return "factorial_plateau(alpha=" + fmt_param(alpha_) + ")";
  }
  KernelSpec spec() const override { return {"factorial_plateau", {{"alpha", alpha_}}, {}}; }
  bool smooth() const override { return false; }
  bool analytic_growth() const override { return false; }

  static int plateau_index(std::int64_t j) {
    // largest m with m! <= j
    int m = 1;
    std::int64_t f = 1;
    while (true) {
      std::int64_t next = 0;
      if (__builtin_mul_overflow(f, static_cast<std::int64_t>(m + 1), &next) || next > j) break;
      f = next;
      ++m;
    }
    return m;
  }
  // log of the plateau value for real plateau index m >= 1
  double log_value(double m) const {
    const double lg = lgam(m + 1.0);
    const double L = lg > 30.0 ? lg + std::log1p(std::exp(-lg)) : std::log1p(std::exp(lg));
    return -lg - (1.0 + alpha_) * std::log(L);
  }
  double at(std::int64_t j) const override { return std::exp(log_at(j)); }
  double log_at(std::int64_t j) const override { return log_value(plateau_index(j)); }

  // count_m * k_m = m / log(1+m!)^{1+alpha} in log form
  double log_mass(double m) const { return std::log(m) + lgam(m + 1.0) + log_value(m); }

  double tail_bound(std::int64_t R) const override {
    if (R < 1) R = 0;
    double acc = 0.0;
    int m0 = 0;
    if (R >= 1) {
      m0 = plateau_index(R);
      // rest of plateau m0: j in (R, (m0+1)! - 1]
      const double end = std::exp(lgam(m0 + 2.0));  // (m0+1)!
      acc += std::max(0.0, end - 1.0 - static_cast<double>(R)) * std::exp(log_value(m0));
    }
    const int m_stop = m0 + 200000;
    for (int m = m0 + 1; m <= m_stop; ++m) acc += std::exp(log_mass(m));
    // count_m k_m <= 1/(m (log m - 1)^{1+alpha}) for alpha >= 1 (log m! >= m log m - m)
    acc += std::pow(std::log(static_cast<double>(m_stop)) - 1.0, -alpha_) / alpha_;
    return 2.0 * acc;
  }
  bool converges(Selector s, double p) const override {
    switch (s) {
      case Selector::l1: return true;
      case Selector::moment: return p <= 0.0;
      case Selector::frac_moment: return p <= 0.0;
      case Selector::entropy_M:
      case Selector::log_condition_sum: return alpha_ >= 2.0;
    }
    return false;
  }
  Aggregate half_sum(const Factor& f, double tol) const override {
    auto term = [&](double m) {
      const double lv = log_value(m);
      return std::exp(log_mass(m)) * f(lv, std::exp(lgam(m + 1.0)));
    };
    auto res = sum_smooth([&](std::int64_t m) { return term(static_cast<double>(m)); },
                          [&](double m, int) { return term(m); }, 1, tol, 64, kMaxRadius);
    Aggregate a;
    a.value = res.value;
    a.error = res.error;
    a.radius = res.radius;
    a.note = "plateau sums with Euler-Maclaurin tail in the plateau index";
    return a;
  }

 private:
  double alpha_;
};

class EvenOddModel final : public KernelModel {
 public:
  EvenOddModel(double be, double bo) : be_(be), bo_(bo) {}
  Family family() const override { return Family::even_odd; }
  std::string label() const override {
    return "even_odd(beta_even=" + fmt_param(be_) + ",beta_odd=" + fmt_param(bo_) + ")";
  }
  KernelSpec spec() const override {
    return {"even_odd", {{"beta_even", be_}, {"beta_odd", bo_}}, {}};
  }
  double at(std::int64_t j) const override {
    return std::pow(static_cast<double>(j), -1.0 - (j % 2 == 0 ? be_ : bo_));
  }
  double log_cont(double x, int r) const override {
    return -(1.0 + (r == 0 ? be_ : bo_)) * std::log(x);
  }
  int period() const override { return 2; }
  double tail_bound(std::int64_t R) const override {
    const double r = static_cast<double>(std::max<std::int64_t>(R, 1));
    const double head = R < 1 ? 2.0 : 0.0;
    return head + 2.0 * std::pow(r, -be_) / be_ + 2.0 * std::pow(r, -bo_) / bo_;
  }
  bool converges(Selector s, double p) const override {
    return power_law_converges(1.0 + std::min(be_, bo_), s, p);
  }
  bool analytic_monotone() const override { return false; }
  bool analytic_growth() const override { return false; }

 private:
  double be_, bo_;
};

}  // namespace

double KernelModel::log_at(std::int64_t j) const {
  const double v = at(j);
  return v > 0.0 ? std::log(v) : -kInf;
}

double KernelModel::log_cont(double, int) const {
  throw InvalidArgument("kernel family has no smooth continuation");
}

Aggregate KernelModel::half_sum(const Factor& f, double tol) const {
  auto term = [&](std::int64_t j) {
    const double lk = log_at(j);
    if (lk == -kInf) return 0.0;
    return std::exp(lk) * f(lk, static_cast<double>(j));
  };
  auto cont = [&](double x, int r) {
    const double lk = log_cont(x, r);
    const double k = std::exp(lk);
    if (k == 0.0) return 0.0;
    return k * f(lk, x);
  };
  // x k(x) factor at x = e^s; the factor sees x = inf past the double range
  auto cont_log = [&](double s, int r) {
    const double lxk = log_xk_at_log(s, r);
    const double xk = std::exp(lxk);
    if (xk == 0.0) return 0.0;
    return xk * f(lxk - s, std::exp(s));
  };
  const auto res = sum_smooth(term, cont, period(), tol, kMinRadius, kMaxRadius, cont_log);
  Aggregate a;
  a.value = res.value;
  a.error = res.error;
  a.radius = res.radius;
  a.note = "explicit sum with Euler-Maclaurin tail";
  return a;
}

Aggregate KernelModel::cached(const std::string& key,
                              const std::function<Aggregate()>& compute) const {
  if (key.empty()) return compute();
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Aggregate a = compute();
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, a).first->second;
}

}  // namespace detail

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::power: return "power";
    case Family::fractional: return "fractional";
    case Family::exponential: return "exponential";
    case Family::finite: return "finite";
    case Family::log: return "log";
    case Family::factorial_plateau: return "factorial_plateau";
    case Family::even_odd: return "even_odd";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::power, Family::fractional, Family::exponential, Family::finite,
                   Family::log, Family::factorial_plateau, Family::even_odd}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

std::string to_string(Selector s) {
  switch (s) {
    case Selector::l1: return "l1";
    case Selector::moment: return "moment";
    case Selector::frac_moment: return "frac_moment";
    case Selector::entropy_M: return "entropy_M";
    case Selector::log_condition_sum: return "log_condition_sum";
  }
  return "unknown";
}

Selector selector_from_string(const std::string& name) {
  for (Selector s : {Selector::l1, Selector::moment, Selector::frac_moment, Selector::entropy_M,
                     Selector::log_condition_sum}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown aggregate selector '" + name + "'");
}

std::string to_string(EvidenceTag t) {
  return t == EvidenceTag::verified_with_analytic_tail ? "verified on [1,radius] + analytic tail"
                                                       : "empirical only";
}

Kernel Kernel::power(double beta) {
  require(finite_positive(beta), "power kernel: beta must be > 0");
  return Kernel(std::make_shared<detail::PowerModel>(beta));
}

Kernel Kernel::fractional(double beta) {
  require(std::isfinite(beta) && beta > 0.0 && beta < 2.0,
          "fractional kernel: beta must lie in (0, 2)");
  return Kernel(std::make_shared<detail::FractionalModel>(beta));
}

Kernel Kernel::exponential(double alpha) {
  require(finite_positive(alpha), "exponential kernel: alpha must be > 0");
  return Kernel(std::make_shared<detail::ExponentialModel>(alpha));
}

Kernel Kernel::finite(std::vector<double> values) {
  require(!values.empty(), "finite kernel: values must be non-empty");
  bool any = false;
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0, "finite kernel: values must be finite and >= 0");
    any = any || v > 0.0;
  }
  require(any, "finite kernel: at least one value must be positive");
  return Kernel(std::make_shared<detail::FiniteModel>(std::move(values)));
}

Kernel Kernel::log(double alpha) {
  require(finite_positive(alpha), "log kernel: alpha must be > 0");
  return Kernel(std::make_shared<detail::LogModel>(alpha));
}

Kernel Kernel::factorial_plateau(double alpha) {
  require(std::isfinite(alpha) && alpha >= 1.0, "factorial_plateau kernel: alpha must be >= 1");
  return Kernel(std::make_shared<detail::PlateauModel>(alpha));
}

Kernel Kernel::even_odd(double beta_even, double beta_odd) {
  require(finite_positive(beta_even) && finite_positive(beta_odd),
          "even_odd kernel: both exponents must be > 0");
  return Kernel(std::make_shared<detail::EvenOddModel>(beta_even, beta_odd));
}

double Kernel::operator()(std::int64_t j) const {
  if (j == 0) return 0.0;
  if (j == std::numeric_limits<std::int64_t>::min()) return 0.0;
  return model_->at(j < 0 ? -j : j);
}

Family Kernel::family() const { return model_->family(); }
Support Kernel::support() const { return model_->support(); }
std::string Kernel::label() const { return model_->label(); }
KernelSpec Kernel::spec() const { return model_->spec(); }
double Kernel::tail_bound(std::int64_t R) const { return model_->tail_bound(R); }
double Kernel::log_continuous(double x, int residue) const { return model_->log_cont(x, residue); }
int Kernel::period() const { return model_->period(); }
bool Kernel::has_smooth_extension() const { return model_->smooth(); }

Aggregate Kernel::weighted_sum(const std::function<double(double, double)>& factor, double tol,
                               const std::string& cache_key) const {
  require(finite_positive(tol), "weighted_sum: tol must be > 0");
  return model_->cached(cache_key, [&] {
    Aggregate a = model_->half_sum(factor, 0.5 * tol);
    a.value *= 2.0;
    a.error *= 2.0;
    return a;
  });
}

bool Kernel::converges(Selector which, double param) const {
  return model_->converges(which, param);
}

Aggregate Kernel::aggregate(Selector which, double param, double tol) const {
  require(finite_positive(tol), "kernel_aggregate: tol must be > 0");
  switch (which) {
    case Selector::moment:
      require(std::isfinite(param) && param >= 0.0, "moment: alpha must be >= 0");
      break;
    case Selector::frac_moment:
      require(std::isfinite(param) && param > 0.0 && param < 1.0,
              "frac_moment: delta must lie in (0, 1)");
      break;
    default: break;
  }
  if (!converges(which, param)) {
    Aggregate a;
    a.divergent = true;
    a.value = std::numeric_limits<double>::infinity();
    a.note = to_string(which) + " diverges for " + label() + " (analytic tail lower bound is infinite)";
    return a;
  }
  std::function<double(double, double)> factor;
  switch (which) {
    case Selector::l1: factor = [](double, double) { return 1.0; }; break;
    case Selector::moment:
      factor = [param](double, double x) { return std::pow(x, param); };
      break;
    case Selector::frac_moment:
      factor = [param](double lk, double) { return std::exp(-param * lk); };
      break;
    case Selector::entropy_M: factor = [](double lk, double) { return -lk; }; break;
    case Selector::log_condition_sum:
      factor = [](double lk, double) {
        return lk < 0.0 ? -lk + std::log1p(2.0 * std::exp(lk)) : std::log(2.0 + std::exp(-lk));
      };
      break;
  }
  std::ostringstream key;
  key.precision(17);
  key << to_string(which) << ':' << param << ':' << tol;
  Aggregate a = weighted_sum(factor, tol, key.str());
  // an absolute target below the rounding floor of the value is unattainable
  if (!(a.error <= std::max(tol, 2e-14 * std::fabs(a.value)))) {
    throw AccuracyFailure(to_string(which) + " of " + label() + ": reached error " +
                          detail::fmt_param(a.error) + " > tol " + detail::fmt_param(tol) +
                          " at radius " + std::to_string(a.radius));
  }
  return a;
}

double Kernel::l1() const { return aggregate(Selector::l1, 0.0, 1e-12).value; }

double Kernel::entropy() const {
  Aggregate a = aggregate(Selector::entropy_M, 0.0, 1e-12);
  if (a.divergent) throw DivergentSeries(a.note);
  return a.value;
}

double Kernel::l2_squared() const {
  Aggregate a = weighted_sum([](double lk, double) { return std::exp(lk); }, 1e-15, "l2sq");
  return a.value;
}

double Kernel::autoconvolution(std::int64_t m) const {
  if (m < 0) m = -m;
  const auto& km = *model_;
  const Kernel& self = *this;
  Aggregate a = km.cached("conv:" + std::to_string(m), [&] {
    Aggregate out;
    // sum_{p in Z} k(p) k(m-p) = sum_{p >= 1} k(p) (k(p-m) + k(p+m))
    auto term = [&](std::int64_t p) { return self(p) * (self(p - m) + self(p + m)); };
    if (family() == Family::finite) {
      detail::CompensatedSum acc;
      const std::int64_t R = support().radius;
      for (std::int64_t p = 1; p <= R; ++p) acc.add(term(p));
      out.value = acc.value();
      out.radius = R;
      return out;
    }
    if (km.smooth()) {
      const int per = km.period();
      const double md = static_cast<double>(m);
      auto cont = [&](double x, int r) {
        const int rm = static_cast<int>(((r - m) % per + per) % per);
        const int rp = static_cast<int>(((r + m) % per + per) % per);
        return std::exp(km.log_cont(x, r)) *
               (std::exp(km.log_cont(x - md, rm)) + std::exp(km.log_cont(x + md, rp)));
      };
      const auto res = detail::sum_smooth(term, cont, per, 1e-16,
                                          std::max<std::int64_t>(512, 4 * m + 64),
                                          std::int64_t{1} << 20);
      out.value = res.value;
      out.error = res.error;
      out.radius = res.radius;
      return out;
    }
    // Generic fallback: explicit sum, remainder bounded by a product of tails.
    const std::int64_t R = std::max<std::int64_t>(std::int64_t{1} << 20, 4 * m);
    detail::CompensatedSum acc;
    for (std::int64_t p = 1; p <= R; ++p) acc.add(term(p));
    out.value = acc.value();
    out.error = tail_bound(R) * tail_bound(R - m - 1);
    out.radius = R;
    return out;
  });
  return a.value;
}

Kernel Kernel::truncated(std::int64_t R) const {
  require(R >= 1, "truncated: radius must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(R));
  for (std::int64_t j = 1; j <= R; ++j) v[static_cast<std::size_t>(j - 1)] = model_->at(j);
  return finite(std::move(v));
}

Kernel make_kernel(const KernelSpec& spec) {
  auto param = [&](const char* name) {
    auto it = spec.params.find(name);
    if (it == spec.params.end()) {
      throw InvalidArgument("kernel '" + spec.family + "' requires parameter '" + name + "'");
    }
    return it->second;
  };
  switch (family_from_string(spec.family)) {
    case Family::power: return Kernel::power(param("beta"));
    case Family::fractional: return Kernel::fractional(param("beta"));
    case Family::exponential: return Kernel::exponential(param("alpha"));
    case Family::finite: return Kernel::finite(spec.values);
    case Family::log: return Kernel::log(param("alpha"));
    case Family::factorial_plateau: return Kernel::factorial_plateau(param("alpha"));
    case Family::even_odd: return Kernel::even_odd(param("beta_even"), param("beta_odd"));
  }
  throw InvalidArgument("unknown kernel family");
}

ConditionReport kernel_conditions(const Kernel& k, std::int64_t radius,
                                  std::optional<double> tau) {
  require(radius >= 2, "kernel_conditions: radius must be >= 2");
  ConditionReport rep;
  rep.radius = radius;
  rep.non_increasing = true;
  double best = 0.0;
  for (std::int64_t j = 1; j < radius; ++j) {
    const double a = k(j);
    const double b = k(j + 1);
    if (b > a && rep.non_increasing) {
      rep.non_increasing = false;
      rep.first_increase = j;
    }
    double ratio;
    if (a == 0.0 && b == 0.0) continue;
    if (b == 0.0) ratio = std::numeric_limits<double>::infinity();
    else ratio = a / b;
    if (ratio > best) {
      best = ratio;
      rep.growth_argmax = j;
      rep.growth_records.emplace_back(j, ratio);
    }
  }
  rep.growth_constant = best;

  const auto& m = k.model();
  const bool finite_family = k.family() == Family::finite;
  const bool covers_support = finite_family && radius >= k.support().radius;
  const auto tag = [](bool ok) {
    return ok ? EvidenceTag::verified_with_analytic_tail : EvidenceTag::empirical_only;
  };
  rep.monotone_tag = tag(finite_family ? covers_support : m.analytic_monotone());
  rep.growth_tag =
      tag(finite_family ? (covers_support || std::isinf(best)) : m.analytic_growth());
  rep.series_tag = EvidenceTag::verified_with_analytic_tail;
  if (tau) {
    require(*tau > 0.0 && *tau < 1.0, "kernel_conditions: tau must lie in (0, 1)");
    rep.tau = tau;
    rep.frac_moment_converges = k.converges(Selector::frac_moment, *tau);
  }
  rep.log_condition_converges = k.converges(Selector::log_condition_sum, 0.0);
  return rep;
}

}  // namespace jumpcd
