// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jumpcd {

enum class Family { power, fractional, exponential, finite, log, factorial_plateau, even_odd };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

enum class SupportKind { finite, all_nonzero, pattern };

struct Support {
  SupportKind kind = SupportKind::all_nonzero;
  std::int64_t radius = 0;  // meaningful for SupportKind::finite
};

// Weighted series over the support of k. The weight is expressed as a factor
// multiplying k(j): term(j) = k(j) * factor(log k(j), |j|).
enum class Selector { l1, moment, frac_moment, entropy_M, log_condition_sum };

std::string to_string(Selector s);
Selector selector_from_string(const std::string& name);

struct Aggregate {
  bool divergent = false;
  double value = 0.0;
  double error = 0.0;        // certified or estimated bound on |value - exact|
  std::int64_t radius = 0;   // explicit summation radius used
  std::string note;          // divergence reason or tail method
};

struct KernelSpec {
  std::string family;
  std::map<std::string, double> params;
  std::vector<double> values;  // finite family only: k(1), ..., k(R)
};

namespace detail {
class KernelModel;
}

// Symmetric nonnegative jump rates on Z with k(0) = 0. Immutable, cheap to copy.
class Kernel {
 public:
  static Kernel power(double beta);
  static Kernel fractional(double beta);
  static Kernel exponential(double alpha);
  static Kernel finite(std::vector<double> values);
  static Kernel log(double alpha);
  static Kernel factorial_plateau(double alpha);
  // Rates |j|^{-1-beta_even} on even j and |j|^{-1-beta_odd} on odd j.
  static Kernel even_odd(double beta_even, double beta_odd);

  double operator()(std::int64_t j) const;
  double at(std::int64_t j) const { return (*this)(j); }

  Family family() const;
  Support support() const;
  std::string label() const;
  KernelSpec spec() const;

  // Certified upper bound on sum_{|j| > R} k(j).
  double tail_bound(std::int64_t R) const;

  // Sum of factor-weighted rates, sum_{j in Z, k(j) > 0} k(j) * factor(log k(j), |j|),
  // to absolute accuracy tol (reported in Aggregate::error; not thrown on shortfall).
  // The caller is responsible for convergence. For the plateau family the factor
  // may depend on log k only. A non-empty cache_key memoises the result.
  Aggregate weighted_sum(const std::function<double(double, double)>& factor, double tol,
                         const std::string& cache_key = {}) const;

  Aggregate aggregate(Selector which, double param, double tol) const;
  // Whether the selector's series converges, decided analytically per family.
  bool converges(Selector which, double param) const;

  // |k|_1 to absolute accuracy 1e-12.
  double l1() const;
  // M(k) = sum k log(1/k) (throws DivergentSeries if it diverges).
  double entropy() const;

  // sum_{p in Z} k(p) k(m - p), to absolute accuracy ~1e-15 (memoised).
  double autoconvolution(std::int64_t m) const;
  // sum_j k(j)^2
  double l2_squared() const;

  // Restriction to |j| <= R as a finite kernel.
  Kernel truncated(std::int64_t R) const;

  // log k along the continuous extension through the residue class of j (large j).
  double log_continuous(double x, int residue) const;
  int period() const;
  bool has_smooth_extension() const;

  const detail::KernelModel& model() const { return *model_; }

 private:
  explicit Kernel(std::shared_ptr<const detail::KernelModel> m) : model_(std::move(m)) {}
  std::shared_ptr<const detail::KernelModel> model_;
};

Kernel make_kernel(const KernelSpec& spec);

enum class EvidenceTag { verified_with_analytic_tail, empirical_only };
std::string to_string(EvidenceTag t);

struct ConditionReport {
  std::int64_t radius = 0;
  bool non_increasing = false;
  std::int64_t first_increase = 0;  // first j with k(j+1) > k(j), 0 if none
  double growth_constant = 0.0;      // max k(j)/k(j+1), +inf when k(j+1) = 0 < k(j)
  std::int64_t growth_argmax = 0;
  // Running maxima of k(j)/k(j+1): (j, ratio) each time the ratio exceeds all earlier ones.
  std::vector<std::pair<std::int64_t, double>> growth_records;
  std::optional<double> tau;
  std::optional<bool> frac_moment_converges;
  bool log_condition_converges = false;
  EvidenceTag monotone_tag = EvidenceTag::empirical_only;
  EvidenceTag growth_tag = EvidenceTag::empirical_only;
  EvidenceTag series_tag = EvidenceTag::empirical_only;
};

ConditionReport kernel_conditions(const Kernel& k, std::int64_t radius,
                                  std::optional<double> tau = std::nullopt);

}  // namespace jumpcd
