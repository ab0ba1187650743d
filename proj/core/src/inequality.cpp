// SPDX-License-Identifier: Apache-2.0
#include "jumpcd/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "jumpcd/errors.hpp"
#include "jumpcd/upsilon.hpp"

namespace jumpcd {
namespace {

constexpr double kPsiFloor = 1e-14;

double relative(double margin, double rhs) { return margin / std::max(1.0, std::fabs(rhs)); }

// Step-shaped profiles modelled on the finite-support equality case: -s on the
// first `inner` sites of the support, -2s elsewhere.
LatticeFunction step_profile(const Kernel& k, std::int64_t W, std::int64_t inner, double s) {
  std::vector<double> v(static_cast<std::size_t>(2 * W + 1), -2.0 * s);
  v[static_cast<std::size_t>(W)] = 0.0;
  for (std::int64_t j = 1; j <= std::min(inner, W); ++j) {
    if (k(j) > 0.0) {
      v[static_cast<std::size_t>(W + j)] = -s;
      v[static_cast<std::size_t>(W - j)] = -s;
    }
  }
  return LatticeFunction(W, std::move(v), -2.0 * s);
}

std::vector<LatticeFunction> seed_functions(const Kernel& k, std::int64_t W) {
  std::vector<LatticeFunction> seeds;
  seeds.push_back(LatticeFunction::constant(W, 0.0));
  const Support sup = k.support();
  std::vector<std::int64_t> inner;
  if (sup.kind != SupportKind::all_nonzero && sup.radius <= W) inner.push_back(sup.radius);
  for (std::int64_t m : {1, 2, 4}) {
    if (std::find(inner.begin(), inner.end(), m) == inner.end()) inner.push_back(m);
  }
  for (std::int64_t m : inner) {
    for (double s : {1.0, 0.5, 2.0}) seeds.push_back(step_profile(k, W, m, s));
  }
  if (k.converges(Selector::log_condition_sum, 0.0)) {
    const std::int64_t R =
        sup.kind != SupportKind::all_nonzero ? std::min(sup.radius, W) : W;
    for (double a : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      try {
        const ExtremalProfile p = extremal_profile(k, a, R);
        std::vector<double> v(static_cast<std::size_t>(2 * W + 1), 0.0);
        double edge = 0.0;
        for (const auto& pt : p.points) {
          v[static_cast<std::size_t>(pt.j + W)] = -pt.v;
          if (std::llabs(pt.j) == R) edge = -pt.v;
        }
        seeds.emplace_back(W, std::move(v), edge);
      } catch (const std::exception&) {
        // profile unavailable for this kernel; the random search still runs
      }
    }
  }
  return seeds;
}

// Deterministic search minimising `score`. Candidate i is a seed, a random draw,
// or a perturbation of the current minimiser, decided by i and the rng stream.
void search(const Kernel& k, std::int64_t W, std::size_t budget, std::uint64_t seed,
            const std::function<double(const LatticeFunction&)>& score,
            const std::function<void(const LatticeFunction&, double)>& observe) {
  const std::vector<LatticeFunction> seeds = seed_functions(k, W);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::optional<LatticeFunction> best;
  double best_score = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(2 * W + 1);

  for (std::size_t i = 0; i < budget; ++i) {
    std::optional<LatticeFunction> cand;
    if (i < seeds.size()) {
      cand = seeds[i];
    } else if (!best || (i - seeds.size()) % 3 == 0) {
      const double sigma = std::exp(std::log(0.01) + unif(rng) * (std::log(5.0) - std::log(0.01)));
      const bool even = unif(rng) < 0.3;
      std::vector<double> v(n, 0.0);
      for (std::int64_t j = 1; j <= W; ++j) {
        const double s = sigma / (1.0 + static_cast<double>(j));
        const double a = s * normal(rng);
        const double b = even ? a : s * normal(rng);
        v[static_cast<std::size_t>(W + j)] = a;
        v[static_cast<std::size_t>(W - j)] = b;
      }
      const double ext = unif(rng) < 0.5 ? 0.0 : sigma / (1.0 + W) * normal(rng);
      cand.emplace(W, std::move(v), ext);
    } else {
      std::vector<double> v = best->values();
      double ext = best->exterior();
      const double pick = unif(rng);
      const double h = normal(rng);
      if (pick < 0.1) {
        ext += 0.1 * (std::fabs(ext) + 0.05) * h;
      } else if (pick < 0.2) {
        const double f = std::exp(0.1 * h);
        for (double& x : v) x *= f;
        ext *= f;
      } else {
        std::uniform_int_distribution<std::int64_t> site(1, W);
        const std::int64_t j = site(rng);
        const bool both = unif(rng) < 0.5;
        const auto ip = static_cast<std::size_t>(W + j), im = static_cast<std::size_t>(W - j);
        const double step = 0.1 * (std::fabs(v[ip]) + 0.05) * h;
        if (both || unif(rng) < 0.5) v[ip] += step;
        if (both || !(unif(rng) < 0.5)) v[im] += step;
      }
      cand.emplace(W, std::move(v), ext);
    }
    const double s = score(*cand);
    observe(*cand, s);
    if (s < best_score) {
      best_score = s;
      best = std::move(cand);
    }
  }
}

std::string describe(const LatticeFunction& u) {
  std::ostringstream os;
  os.precision(6);
  os << "u on [-" << u.window() << "," << u.window() << "], exterior " << u.exterior()
     << ", sup|u| " << u.sup_abs();
  return os.str();
}

}  // namespace

MarginReport cd_adversarial(const Kernel& k, const CDFunction& F, std::int64_t W,
                            std::size_t budget, std::uint64_t seed, double tolerance) {
  if (W < 1) throw InvalidArgument("cd_adversarial: W must be >= 1");
  if (budget < 1) throw InvalidArgument("cd_adversarial: budget must be >= 1");
  MarginReport rep;
  rep.inequality = "CD_Upsilon(0,F): Psi2(u)(0) >= F(-Lu(0))";
  rep.tolerance = tolerance;
  rep.settings = {{"W", double(W)}, {"budget", double(budget)}, {"seed", double(seed)}};
  auto margin = [&](const LatticeFunction& u, double* rhs) {
    const double minus_L = -apply_L(k, u, 0, 1e-13);
    const double r = F(std::max(minus_L, 0.0));
    if (rhs) *rhs = r;
    return psi2_upsilon(k, u, 0, 1e-13) - r;
  };
  search(
      k, W, budget, seed,
      [&](const LatticeFunction& u) {
        double rhs = 0.0;
        const double m = margin(u, &rhs);
        return relative(m, rhs);
      },
      [&](const LatticeFunction& u, double rel) {
        ++rep.evaluated;
        if (rel < -tolerance) ++rep.negative;
        if (rel < rep.worst_relative) {
          rep.worst_relative = rel;
          rep.worst_margin = margin(u, nullptr);
          rep.witness_function = u;
          rep.witness = describe(u);
        }
      });
  return rep;
}

DCertificate certify_d(const Kernel& k, double gamma, std::int64_t W, std::size_t budget,
                       std::uint64_t seed) {
  if (!(gamma >= 2.0)) throw InvalidArgument("certify_d: gamma must be >= 2");
  if (W < 1) throw InvalidArgument("certify_d: W must be >= 1");
  DCertificate out;
  auto ratio = [&](const LatticeFunction& u) {
    const double psi = psi2_upsilon(k, u, 0, 1e-13);
    if (!(psi >= kPsiFloor)) return 0.0;
    return std::pow(std::fabs(apply_L(k, u, 0, 1e-13)), gamma) / psi;
  };
  search(
      k, W, budget, seed, [&](const LatticeFunction& u) { return -ratio(u); },
      [&](const LatticeFunction& u, double s) {
        ++out.evaluated;
        if (-s > out.d) {
          out.d = -s;
          out.witness = u;
        }
        out.running_max.push_back(out.d);
      });
  return out;
}

PowerCDResult certified_power_cd(double beta, double eps, PowerCDKernel which, std::int64_t W,
                                 std::size_t budget, std::uint64_t seed) {
  const double gamma = power_cd_exponent(beta, eps);
  if (beta <= kGoldenBeta) return power_cd(beta, eps, which);
  const Kernel k = which == PowerCDKernel::power_kernel ? Kernel::power(beta)
                                                        : Kernel::fractional(beta);
  const DCertificate cert = certify_d(k, gamma, W, budget, seed);
  if (!(cert.d > 0.0)) throw AccuracyFailure("certified_power_cd: search produced no ratio");
  return power_cd(beta, eps, which, cert.d);
}

LiYauReport liyau_report(const GeneratorMatrix& G, const CDFunction& F, const HeatSolution& sol,
                         std::int64_t interior_radius, double tolerance,
                         const RelaxationFunction* phi_in) {
  if (sol.W != G.W || sol.mode != G.mode) {
    throw InvalidArgument("liyau_report: solution does not match the generator");
  }
  const bool killed = G.mode == GeneratorMode::killed;
  if (killed && !(sol.exterior > 0.0)) {
    throw InvalidArgument("liyau_report: killed mode needs a positive exterior constant");
  }
  const std::int64_t r = std::min(interior_radius, G.W);
  std::optional<RelaxationFunction> own;
  if (!phi_in) own = relaxation(F.scaled(2.0));
  const RelaxationFunction& phi = phi_in ? *phi_in : *own;
  const Kernel& k = G.kernel;

  LiYauReport rep;
  rep.summary.inequality = "Li-Yau: -L log u <= phi(t) and d/dt log u >= Psi(log u) - phi(t)";
  rep.summary.tolerance = tolerance;
  rep.summary.settings = {{"W", double(G.W)}, {"interior_radius", double(r)},
                          {"killed", killed ? 1.0 : 0.0}};
  for (std::size_t ti = 0; ti < sol.times.size(); ++ti) {
    const double t = sol.times[ti];
    if (!(t > 0.0)) continue;
    const Eigen::VectorXd& u = sol.values[ti];
    std::vector<double> logu(static_cast<std::size_t>(u.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (!(u(i) > 0.0)) throw InvalidArgument("liyau_report: non-positive solution value");
      logu[static_cast<std::size_t>(i)] = std::log(u(i));
    }
    const LatticeFunction v(G.W, std::move(logu), killed ? std::log(sol.exterior) : 0.0);
    const Eigen::VectorXd du = sol.time_derivative(G, ti);
    const double ph = phi(t);
    for (std::int64_t x = -r; x <= r; ++x) {
      LiYauPoint p;
      p.t = t;
      p.x = x;
      p.phi = ph;
      p.minus_Lv = killed ? -apply_L(k, v, x, 1e-13) : -apply_L_window(k, v, x);
      p.psi = killed ? psi_upsilon(k, v, x, 1e-13) : psi_upsilon_window(k, v, x);
      p.dt_v = du(static_cast<Eigen::Index>(x + G.W)) / sol(ti, x);
      p.margin1 = ph - p.minus_Lv;
      p.margin2 = p.dt_v - p.psi + ph;
      rep.points.push_back(p);
      for (double m : {p.margin1, p.margin2}) {
        const double rel = relative(m, ph);
        ++rep.summary.evaluated;
        if (rel < -tolerance) ++rep.summary.negative;
        if (rel < rep.summary.worst_relative) {
          rep.summary.worst_relative = rel;
          rep.summary.worst_margin = m;
          rep.summary.witness_t = t;
          rep.summary.witness_x = x;
        }
      }
    }
  }
  std::ostringstream os;
  os.precision(8);
  os << "t=" << rep.summary.witness_t << ", x=" << rep.summary.witness_x;
  rep.summary.witness = os.str();
  return rep;
}

double max_margin_shift(const LiYauReport& a, const LiYauReport& b) {
  if (a.points.size() != b.points.size()) {
    throw InvalidArgument("max_margin_shift: reports cover different grids");
  }
  double shift = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const LiYauPoint& p = a.points[i];
    const LiYauPoint& q = b.points[i];
    if (p.t != q.t || p.x != q.x) throw InvalidArgument("max_margin_shift: grids differ");
    shift = std::max(shift, std::fabs(relative(p.margin1, p.phi) - relative(q.margin1, q.phi)));
    shift = std::max(shift, std::fabs(relative(p.margin2, p.phi) - relative(q.margin2, q.phi)));
  }
  return shift;
}

LiYauCertificate certify_liyau(const Kernel& k, const CDFunction& F, const LatticeFunction& u0,
                               std::int64_t W, GeneratorMode mode,
                               const std::vector<double>& times, std::int64_t interior_radius,
                               double tolerance) {
  const RelaxationFunction phi = relaxation(F.scaled(2.0));
  const double ext = mode == GeneratorMode::killed ? u0.exterior() : 0.0;
  auto run = [&](std::int64_t w) {
    const GeneratorMatrix G = build_generator(k, w, mode);
    std::vector<double> init(static_cast<std::size_t>(2 * w + 1));
    for (std::int64_t x = -w; x <= w; ++x) init[static_cast<std::size_t>(x + w)] = u0(x);
    const HeatSolution sol = solve_heat(G, init, times, ext);
    return liyau_report(G, F, sol, interior_radius, tolerance, &phi);
  };
  LiYauCertificate c;
  c.base = run(W);
  c.doubled = run(2 * W);
  c.doubling_shift = max_margin_shift(c.base, c.doubled);
  c.certified = c.base.summary.pass() && c.doubled.summary.pass() && c.doubling_shift <= tolerance;
  return c;
}

}  // namespace jumpcd
