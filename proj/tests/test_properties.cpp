// Randomised invariants across modules. Each test draws from a fixed-seed stream.
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/harnack.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/kernel.hpp"
#include "jumpcd/operators.hpp"
#include "jumpcd/upsilon.hpp"

using namespace jumpcd;

namespace {

Kernel random_kernel(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> fam(0, 4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  switch (fam(rng)) {
    case 0: return Kernel::power(0.2 + 1.7 * U(rng));
    case 1: return Kernel::fractional(0.1 + 1.8 * U(rng));
    case 2: return Kernel::exponential(0.2 + 2.0 * U(rng));
    case 3: {
      std::vector<double> v(1 + static_cast<std::size_t>(U(rng) * 6));
      for (double& x : v) x = U(rng) < 0.2 ? 0.0 : U(rng);
      v.front() = 0.5 + U(rng);
      return Kernel::finite(v);
    }
    default: return Kernel::log(1.5 + 2.0 * U(rng));
  }
}

LatticeFunction random_function(std::mt19937_64& rng, std::int64_t W, bool zero_at_0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double amp = std::exp(3.0 * U(rng));
  std::vector<double> v(static_cast<std::size_t>(2 * W + 1));
  for (double& x : v) x = amp * U(rng);
  if (zero_at_0) v[static_cast<std::size_t>(W)] = 0.0;
  return LatticeFunction(W, v, amp * U(rng));
}

}  // namespace

TEST(Property, UpsilonAndHScalarLaws) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(-30.0, 30.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = U(rng), y = U(rng);
    ASSERT_GE(upsilon(x), 0.0);
    ASSERT_NEAR(H_pair(x, x) / H_eval(x), 1.0, 1e-14) << x;
    ASSERT_GE(H_pair(x, y), 0.0);
    if (x > 0.0) { ASSERT_LE(H_eval(x), H_eval(-x)); }
  }
}

TEST(Property, KernelSymmetryAndTails) {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::int64_t> J(-100000, 100000);
  for (int n = 0; n < 40; ++n) {
    const Kernel k = random_kernel(rng);
    for (int i = 0; i < 200; ++i) {
      const std::int64_t j = J(rng);
      ASSERT_EQ(k(j), k(-j)) << k.label();
      ASSERT_GE(k(j), 0.0);
    }
    EXPECT_EQ(k(0), 0.0);
    EXPECT_GE(k.tail_bound(50), k.tail_bound(500));
  }
}

TEST(Property, OperatorNonnegativityAndBasicEstimate) {
  std::mt19937_64 rng(303);
  for (int n = 0; n < 60; ++n) {
    const Kernel k = random_kernel(rng);
    const LatticeFunction u = random_function(rng, 10, true);
    const double p2 = psi2_upsilon(k, u, 0, 1e-12);
    EXPECT_GE(psi_upsilon(k, u, 0), 0.0);
    EXPECT_GE(p2, 0.0);
    EXPECT_LE(basic_lower_bound(k, u, 1e-12), p2 * (1.0 + 1e-12) + 1e-12) << k.label();
    EXPECT_NEAR(apply_L(k, symmetrize(u), 0), apply_L(k, u, 0),
                1e-12 * std::max(1.0, u.sup_abs() * k.l1()));
  }
}

TEST(Property, Psi2TranslationCovariance) {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::int64_t> X(-6, 6);
  for (int n = 0; n < 40; ++n) {
    const Kernel k = random_kernel(rng);
    const LatticeFunction u = random_function(rng, 6, false);
    const std::int64_t x = X(rng);
    const double a = psi2_upsilon(k, u, x, 1e-13), b = psi2_upsilon(k, u.recentred(x), 0, 1e-13);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, a)) << k.label() << " x=" << x;
  }
}

TEST(Property, LagrangeSharpnessOnRandomKernels) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> A(-2.0, 1.5);
  for (int n = 0; n < 12; ++n) {
    const Kernel k = random_kernel(rng);
    if (!k.converges(Selector::log_condition_sum, 0.0)) continue;
    const double a = std::pow(10.0, A(rng));
    const Kernel t = k.truncated(60);
    const ExtremalProfile p = extremal_profile(k, a, 60);
    const double G = LagrangeG(t).exact(a);
    EXPECT_NEAR(p.constraint_sum, a, 1e-8 * std::max(1.0, a)) << k.label();
    EXPECT_NEAR(p.energy / G, 1.0, 1e-8) << k.label();
  }
}

TEST(Property, HarnackDominance) {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<std::int64_t> D(1, 25);
  for (int n = 0; n < 40; ++n) {
    const Kernel k = random_kernel(rng);
    const std::int64_t M = D(rng);
    HarnackPath p;
    try {
      p = optimize_path(k, 0, M, 2);
    } catch (const std::exception&) {
      continue;  // finite kernels may admit no path
    }
    if (k(M) > 0.0) { EXPECT_LE(p.S, harnack_sum(k, {0, M}).S * (1 + 1e-12)); }
    if (k(1) > 0.0) {
      std::vector<std::int64_t> unit;
      for (std::int64_t x = 0; x <= M; ++x) unit.push_back(x);
      EXPECT_LE(p.S, harnack_sum(k, unit).S * (1 + 1e-12));
    }
    EXPECT_LE(p.S, optimize_path(k, 0, M, 0).S * (1 + 1e-12)) << k.label();
  }
}

TEST(Property, HeatPositivityAndMass) {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> U(0.01, 3.0);
  for (int n = 0; n < 8; ++n) {
    const Kernel k = random_kernel(rng);
    const GeneratorMatrix G = build_generator(k, 20, GeneratorMode::conservative);
    std::vector<double> u0(41);
    double mass = 0.0;
    for (double& v : u0) mass += (v = U(rng));
    const HeatSolution s = solve_heat(G, u0, {0.1, 1.0, 7.0});
    for (std::size_t ti = 0; ti < 3; ++ti) {
      EXPECT_GT(s.values[ti].minCoeff(), 0.0);
      EXPECT_NEAR(s.values[ti].sum() / mass, 1.0, 1e-8) << k.label();
    }
  }
}

TEST(Property, RelaxationOrderingFhatPairs) {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    const double gamma = 2.0 + 2.0 * U(rng), delta = 0.1 + U(rng), M = 2.0 / delta * (1.0 + U(rng));
    const double c1 = 0.01 + U(rng), c2 = c1 * (1.0 + 3.0 * U(rng));
    const RelaxationFunction p1 = relaxation(CDFunction::fhat(c1, gamma, delta, M));
    const RelaxationFunction p2 = relaxation(CDFunction::fhat(c2, gamma, delta, M));
    for (double t = 1e-6; t < 1e4; t *= 4.0) ASSERT_GE(p1(t), p2(t) * (1.0 - 1e-14));
  }
}
