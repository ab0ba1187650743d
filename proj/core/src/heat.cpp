// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/heat.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>

#include "jumpcd/errors.hpp"

namespace jumpcd {
namespace {

// Largest Poisson mean handled in a single uniformization sweep.
constexpr double kMaxSweepMean = 40.0;
// Poisson tail mass left untreated, relative to the smallest solution component.
constexpr double kTailRel = 1e-17;

// exp(tQ) applied to the columns of X (all entries >= 0), componentwise accurate.
template <class Mat>
Mat uniformize(const GeneratorMatrix& G, const Mat& X0, double t) {
  Mat X = X0;
  if (t == 0.0 || G.rate == 0.0) return X;
  const double q = G.rate;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(G.size(), G.size()) + G.Q / q;
  double remaining = t;
  while (remaining > 0.0) {
    const double dt = std::min(remaining, kMaxSweepMean / q);
    remaining -= dt;
    const double lam = q * dt;
    const double xmax = X.maxCoeff();
    Mat term = X;
    Mat acc = Mat::Zero(X.rows(), X.cols());
    for (int n = 0;; ++n) {
      const double w = std::exp(-lam + n * std::log(lam) - std::lgamma(n + 1.0));
      acc += w * term;
      const double tail = boost::math::gamma_p(n + 1.0, lam);
      const double floor = acc.minCoeff();
      if (n > lam && tail * xmax <= kTailRel * std::max(floor, 1e-300)) break;
      if (n > lam && tail < 1e-300) break;
      if (n > 10000) throw AccuracyFailure("uniformization did not converge");
      term = P * term;
    }
    X = acc;
  }
  return X;
}

}  // namespace

std::string to_string(GeneratorMode m) {
  return m == GeneratorMode::conservative ? "conservative" : "killed";
}

GeneratorMode generator_mode_from_string(const std::string& s) {
  if (s == "conservative") return GeneratorMode::conservative;
  if (s == "killed") return GeneratorMode::killed;
  throw InvalidArgument("unknown generator mode '" + s + "'");
}

GeneratorMatrix build_generator(const Kernel& k, std::int64_t W, GeneratorMode mode) {
  if (W < 1) throw InvalidArgument("build_generator: W must be >= 1");
  GeneratorMatrix G{k, W, mode, Eigen::MatrixXd::Zero(2 * W + 1, 2 * W + 1), 0.0};
  const Eigen::Index n = 2 * W + 1;
  std::vector<double> rate(static_cast<std::size_t>(2 * W + 1));
  for (std::int64_t d = 0; d <= 2 * W; ++d) rate[static_cast<std::size_t>(d)] = k(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) G.Q(i, j) = rate[static_cast<std::size_t>(std::llabs(i - j))];
    }
  }
  const double l1 = mode == GeneratorMode::killed ? k.l1() : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag;
    if (mode == GeneratorMode::killed) {
      diag = -l1;
    } else {
      // sum in a fixed order: nearest sites first
      double s = 0.0;
      for (std::int64_t d = 2 * W; d >= 1; --d) {
        if (i - d >= 0) s += rate[static_cast<std::size_t>(d)];
        if (i + d < n) s += rate[static_cast<std::size_t>(d)];
      }
      diag = -s;
    }
    G.Q(i, i) = diag;
    G.rate = std::max(G.rate, -diag);
  }
  return G;
}

LatticeFunction HeatSolution::at(std::size_t ti) const {
  const Eigen::VectorXd& v = values.at(ti);
  return LatticeFunction(W, std::vector<double>(v.data(), v.data() + v.size()), exterior);
}

Eigen::VectorXd HeatSolution::time_derivative(const GeneratorMatrix& G, std::size_t ti) const {
  const Eigen::VectorXd shifted = values.at(ti).array() - exterior;
  return G.Q * shifted;
}

void HeatSolution::write_csv(std::ostream& os) const {
  char buf[96];
  os << "# kernel=" << kernel_label << "; W=" << W << "; mode=" << to_string(mode)
     << "; initial=" << initial_record << "\n";
  os << "t,x,value\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::int64_t x = -W; x <= W; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g\n", times[i], static_cast<long long>(x),
                    (*this)(i, x));
      os << buf;
    }
  }
}

HeatSolution solve_heat(const GeneratorMatrix& G, const std::vector<double>& u0,
                        const std::vector<double>& times, double u_ext) {
  const auto n = static_cast<std::size_t>(G.size());
  if (u0.size() != n) throw InvalidArgument("solve_heat: initial datum must have 2W+1 values");
  for (double v : u0) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("solve_heat: initial datum must be positive and finite");
    }
  }
  if (G.mode == GeneratorMode::conservative && u_ext != 0.0) {
    throw InvalidArgument("solve_heat: an exterior value requires killed mode");
  }
  if (!std::isfinite(u_ext)) throw InvalidArgument("solve_heat: exterior must be finite");
  double prev = 0.0;
  for (double t : times) {
    if (!(t >= prev) || !std::isfinite(t)) {
      throw InvalidArgument("solve_heat: times must be non-negative and increasing");
    }
    prev = t;
  }
  Eigen::VectorXd plus(static_cast<Eigen::Index>(n)), minus(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double w = u0[i] - u_ext;
    plus(static_cast<Eigen::Index>(i)) = std::max(w, 0.0);
    minus(static_cast<Eigen::Index>(i)) = std::max(-w, 0.0);
  }
  const bool has_minus = minus.maxCoeff() > 0.0;
  const bool has_plus = plus.maxCoeff() > 0.0;

  HeatSolution sol;
  sol.W = G.W;
  sol.mode = G.mode;
  sol.kernel_label = G.kernel.label();
  sol.exterior = u_ext;
  sol.initial_record = "explicit(" + std::to_string(n) + " values, exterior " +
                       std::to_string(u_ext) + ")";
  sol.times = times;
  double t_prev = 0.0;
  for (double t : times) {
    const double dt = t - t_prev;
    if (has_plus) plus = uniformize(G, plus, dt);
    if (has_minus) minus = uniformize(G, minus, dt);
    t_prev = t;
    Eigen::VectorXd u = (plus - minus).array() + u_ext;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (!(u(i) > 0.0)) {
        throw AccuracyFailure("solve_heat: non-positive component at x=" +
                              std::to_string(i - G.W) + ", t=" + std::to_string(t));
      }
    }
    sol.values.push_back(std::move(u));
  }
  return sol;
}

HeatSolution heat_kernel(const GeneratorMatrix& G, std::int64_t x0,
                         const std::vector<double>& times) {
  if (x0 < -G.W || x0 > G.W) throw InvalidArgument("heat_kernel: x0 outside the window");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(G.size());
  e(static_cast<Eigen::Index>(G.index(x0))) = 1.0;
  HeatSolution sol;
  sol.W = G.W;
  sol.mode = G.mode;
  sol.kernel_label = G.kernel.label();
  sol.initial_record = "delta at " + std::to_string(x0);
  sol.times = times;
  double t_prev = 0.0;
  for (double t : times) {
    if (!(t >= t_prev)) throw InvalidArgument("heat_kernel: times must be increasing");
    e = uniformize(G, e, t - t_prev);
    t_prev = t;
    sol.values.push_back(e);
  }
  return sol;
}

Eigen::MatrixXd propagator(const GeneratorMatrix& G, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("propagator: t must be >= 0");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(G.size(), G.size());
  return uniformize(G, I, t);
}

}  // namespace jumpcd
