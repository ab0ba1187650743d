#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/errors.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/inequality.hpp"
#include "jumpcd/operators.hpp"
#include "jumpcd/upsilon.hpp"

using namespace jumpcd;

namespace {

std::vector<double> log_times(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return t;
}

}  // namespace

TEST(CdAdversarial, NearOptimalLagrangeHolds) {
  const Kernel k = Kernel::power(1.5);
  const CDFunction F = lagrange_G(k).scaled(1.0 - 1e-6);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const MarginReport r = cd_adversarial(k, F, 24, 1500, seed);
    EXPECT_GE(r.worst_relative, -1e-9) << seed << " " << r.witness;
    EXPECT_EQ(r.negative, 0u);
    EXPECT_EQ(r.evaluated, 1500u);
  }
}

TEST(CdAdversarial, InflatedLagrangeViolatedOnFiniteKernel) {
  const Kernel k = Kernel::finite({1.0});
  const MarginReport r = cd_adversarial(k, lagrange_G(k).scaled(1.5), 8, 200, 1);
  EXPECT_LT(r.worst_relative, -1e-3);
  EXPECT_GT(r.negative, 0u);
  EXPECT_FALSE(r.pass());
  ASSERT_TRUE(r.witness_function.has_value());
  // the witness really violates the inequality
  const LatticeFunction& u = *r.witness_function;
  const double lhs = psi2_upsilon(k, u, 0);
  const double rhs = lagrange_G(k).scaled(1.5)(std::max(0.0, -apply_L(k, u, 0)));
  EXPECT_LT(lhs, rhs);
}

TEST(CdAdversarial, NegligibleFunctionGivesNonnegativeMargin) {
  const Kernel k = Kernel::power(0.8);
  const MarginReport r = cd_adversarial(k, CDFunction::power_gamma(1e-300, 2.0), 10, 300, 5);
  EXPECT_GE(r.worst_margin, 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(CdAdversarial, DeterministicAndPrefixStable) {
  const Kernel k = Kernel::power(1.5);
  const CDFunction F = lagrange_G(k);
  const MarginReport a = cd_adversarial(k, F, 12, 300, 42);
  const MarginReport b = cd_adversarial(k, F, 12, 300, 42);
  EXPECT_EQ(a.worst_relative, b.worst_relative);
  EXPECT_EQ(a.witness, b.witness);
  const MarginReport c = cd_adversarial(k, F, 12, 600, 42);
  EXPECT_LE(c.worst_relative, a.worst_relative);
}

TEST(CertifyD, NearestNeighbourSharpExampleValue) {
  const Kernel k = Kernel::finite({1.0});
  const DCertificate c = certify_d(k, 2.0, 4, 100, 1);
  const double closed = 4.0 / (upsilon(2.0) / std::exp(1.0));
  EXPECT_NEAR(closed, 2.4774, 1e-4);
  EXPECT_GE(c.d, closed * (1.0 - 1e-12));
  ASSERT_TRUE(c.witness.has_value());
}

TEST(CertifyD, MonotoneInBudget) {
  const Kernel k = Kernel::power(1.5);
  const DCertificate small = certify_d(k, 3.0, 12, 200, 9);
  const DCertificate big = certify_d(k, 3.0, 12, 400, 9);
  EXPECT_GE(big.d, small.d);
  for (std::size_t i = 0; i < small.running_max.size(); ++i) {
    EXPECT_EQ(small.running_max[i], big.running_max[i]);
    if (i > 0) { EXPECT_GE(small.running_max[i], small.running_max[i - 1]); }
  }
}

TEST(CertifyD, ZeroFunctionExcluded) {
  // the first candidate is u = 0, whose ratio is excluded by the floor
  const DCertificate c = certify_d(Kernel::power(1.5), 2.0, 4, 1, 1);
  EXPECT_EQ(c.d, 0.0);
  EXPECT_FALSE(c.witness.has_value());
}

TEST(ChainRule, LogIdentity) {
  // L(log u) = Lu/u - Psi_Upsilon(log u) for positive u
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  for (const Kernel& k : {Kernel::power(1.5), Kernel::finite({1.0, 0.5})}) {
    std::vector<double> u(41), lu(41);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = U(rng);
      lu[i] = std::log(u[i]);
    }
    const double ext = 0.7;
    const LatticeFunction fu(20, u, ext), fv(20, lu, std::log(ext));
    for (std::int64_t x = -10; x <= 10; ++x) {
      const double lhs = apply_L(k, fv, x, 1e-14);
      const double rhs = apply_L(k, fu, x, 1e-14) / fu(x) - psi_upsilon(k, fv, x, 1e-14);
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::fabs(lhs)));
    }
  }
}

TEST(ChainRule, TimeDerivativeOfLogOnTruncatedSystem) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 24, GeneratorMode::killed);
  std::vector<double> u0(49, 1.0);
  u0[24] = 10.0;
  const double t = 0.7, h = 1e-3;
  const HeatSolution s = solve_heat(G, u0, {t - 2 * h, t - h, t, t + h, t + 2 * h}, 1.0);
  const Eigen::VectorXd du = s.time_derivative(G, 2);
  for (std::int64_t x = -6; x <= 6; ++x) {
    auto lv = [&](std::size_t i) { return std::log(s(i, x)); };
    const double d1 = (lv(3) - lv(1)) / (2 * h), d2 = (lv(4) - lv(0)) / (4 * h);
    const double richardson = (4.0 * d1 - d2) / 3.0;
    EXPECT_NEAR(richardson, du(x + 24) / s(2, x), 1e-6) << x;
  }
}

TEST(LiYau, ConstantDatumMarginsEqualPhi) {
  const Kernel k = Kernel::power(1.5);
  const CDFunction F = lagrange_G(k);
  const GeneratorMatrix G = build_generator(k, 16, GeneratorMode::killed);
  const HeatSolution s = solve_heat(G, std::vector<double>(33, 1.0), {0.1, 1.0}, 1.0);
  const LiYauReport r = liyau_report(G, F, s, 4, 1e-6);
  for (const LiYauPoint& p : r.points) {
    EXPECT_NEAR(p.margin1, p.phi, 1e-12 * p.phi);
    EXPECT_NEAR(p.margin2, p.phi, 1e-12 * p.phi);
  }
  EXPECT_TRUE(r.summary.pass());
}

TEST(LiYau, DeltaPlusConstantPassesSmallWindow) {
  const Kernel k = Kernel::power(1.5);
  const CDFunction F = lagrange_G(k);
  std::vector<double> v(65, 1.0);
  v[32] = 10.0;
  const LatticeFunction u0(32, v, 1.0);
  const LiYauCertificate c = certify_liyau(k, F, u0, 32, GeneratorMode::killed,
                                           log_times(0.05, 5.0, 8), 8, 1e-6);
  EXPECT_TRUE(c.base.summary.pass()) << c.base.summary.witness;
  EXPECT_TRUE(c.doubled.summary.pass());
  EXPECT_GE(c.base.summary.worst_relative, 0.0);
}

TEST(LiYau, DoubledFunctionIsBinding) {
  const CDFunction F = lagrange_G(Kernel::power(1.5));
  const RelaxationFunction p1 = relaxation(F), p2 = relaxation(F.scaled(2.0));
  for (double t = 1e-3; t < 1e2; t *= 3.0) EXPECT_LE(p2(t), p1(t));
}

TEST(LiYau, RejectsNonPositiveSolution) {
  const Kernel k = Kernel::power(1.5);
  const GeneratorMatrix G = build_generator(k, 4, GeneratorMode::conservative);
  HeatSolution s = solve_heat(G, std::vector<double>(9, 1.0), {0.5});
  s.values[0](3) = -1.0;
  EXPECT_THROW(liyau_report(G, lagrange_G(k), s, 2, 1e-6), InvalidArgument);
}
