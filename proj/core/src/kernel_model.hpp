// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "jumpcd/kernel.hpp"

namespace jumpcd::detail {

using Factor = std::function<double(double, double)>;

class KernelModel {
 public:
  virtual ~KernelModel() = default;

  virtual Family family() const = 0;
  virtual std::string label() const = 0;
  virtual KernelSpec spec() const = 0;

  // Rate at j >= 1.
  virtual double at(std::int64_t j) const = 0;
  virtual double log_at(std::int64_t j) const;
  // Smooth continuation of log k along residue class r mod period(); only for smooth families.
  virtual double log_cont(double x, int r) const;
  // log(x k(x)) at x = e^s along residue class r, for s beyond the double range of x.
  virtual double log_xk_at_log(double s, int r) const { return s + log_cont(std::exp(s), r); }
  virtual int period() const { return 1; }
  virtual bool smooth() const { return true; }
  virtual Support support() const { return {SupportKind::all_nonzero, 0}; }

  virtual double tail_bound(std::int64_t R) const = 0;
  virtual bool converges(Selector s, double param) const = 0;

  // One-sided sum over j >= 1 of k(j) factor(log k(j), j), to tol.
  virtual Aggregate half_sum(const Factor& f, double tol) const;

  virtual bool analytic_monotone() const { return true; }
  virtual bool analytic_growth() const { return true; }

  Aggregate cached(const std::string& key, const std::function<Aggregate()>& compute) const;

 private:
  mutable std::mutex mu_;
  mutable std::map<std::string, Aggregate> cache_;
};

}  // namespace jumpcd::detail
