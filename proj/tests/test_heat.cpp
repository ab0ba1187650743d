#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "jumpcd/errors.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/kernel.hpp"

using namespace jumpcd;

TEST(Generator, NearestNeighbourConservative) {
  const GeneratorMatrix G = build_generator(Kernel::finite({1.0}), 1, GeneratorMode::conservative);
  Eigen::Matrix3d want;
  want << -1, 1, 0, 1, -2, 1, 0, 1, -1;
  EXPECT_EQ((G.Q - want).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generator, NearestNeighbourKilled) {
  const GeneratorMatrix G = build_generator(Kernel::finite({1.0}), 1, GeneratorMode::killed);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(G.Q(i, i), -2.0);
  EXPECT_EQ(G.Q.row(0).sum(), -1.0);
  EXPECT_EQ(G.Q.row(2).sum(), -1.0);
  EXPECT_EQ(G.Q.row(1).sum(), 0.0);
}

TEST(Generator, PowerEntriesAndInvariants) {
  const Kernel k = Kernel::power(1.5);
  const GeneratorMatrix G = build_generator(k, 2, GeneratorMode::conservative);
  EXPECT_NEAR(G.Q(G.index(0), G.index(2)), std::pow(2.0, -2.5), 1e-16);
  for (GeneratorMode m : {GeneratorMode::conservative, GeneratorMode::killed}) {
    const GeneratorMatrix H = build_generator(k, 20, m);
    EXPECT_EQ((H.Q - H.Q.transpose()).cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < H.Q.rows(); ++i) {
      for (Eigen::Index j = 0; j < H.Q.cols(); ++j) {
        if (i != j) { ASSERT_GE(H.Q(i, j), 0.0); }
      }
      if (m == GeneratorMode::conservative) { EXPECT_NEAR(H.Q.row(i).sum(), 0.0, 1e-12); }
      else { EXPECT_LE(H.Q.row(i).sum(), 0.0); }
    }
  }
  EXPECT_THROW(build_generator(k, 0, GeneratorMode::killed), InvalidArgument);
}

TEST(Generator, ModeNames) {
  EXPECT_EQ(generator_mode_from_string(to_string(GeneratorMode::killed)), GeneratorMode::killed);
  EXPECT_THROW(generator_mode_from_string("x"), InvalidArgument);
}

TEST(SolveHeat, ConstantStaysConstantAndTimeZero) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 16, GeneratorMode::conservative);
  const std::vector<double> ones(33, 1.0);
  const HeatSolution s = solve_heat(G, ones, {0.0, 0.5, 3.0, 20.0});
  for (std::size_t ti = 0; ti < s.times.size(); ++ti) {
    for (std::int64_t x = -16; x <= 16; ++x) EXPECT_NEAR(s(ti, x), 1.0, 1e-13);
  }
  std::mt19937_64 rng(4);
  std::vector<double> u0(33);
  for (double& v : u0) v = 0.1 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const HeatSolution z = solve_heat(G, u0, {0.0});
  for (std::int64_t x = -16; x <= 16; ++x) EXPECT_EQ(z(0, x), u0[static_cast<std::size_t>(x + 16)]);
}

TEST(SolveHeat, RejectsBadInput) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 4, GeneratorMode::conservative);
  std::vector<double> u0(9, 1.0);
  u0[3] = 0.0;
  EXPECT_THROW(solve_heat(G, u0, {1.0}), InvalidArgument);
  EXPECT_THROW(solve_heat(G, std::vector<double>(9, 1.0), {1.0, 0.5}), InvalidArgument);
  EXPECT_THROW(solve_heat(G, std::vector<double>(5, 1.0), {1.0}), InvalidArgument);
}

TEST(SolveHeat, MatchesAdaptiveOdeOracle) {
  const std::int64_t W = 16;
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), W, GeneratorMode::conservative);
  std::mt19937_64 rng(2024);
  std::vector<double> u0(static_cast<std::size_t>(2 * W + 1));
  for (double& v : u0) v = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  const HeatSolution s = solve_heat(G, u0, {1.0});

  using State = std::vector<double>;
  State y = u0;
  const Eigen::MatrixXd& Q = G.Q;
  auto rhs = [&Q](const State& x, State& dx, double) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> dv(dx.data(), static_cast<Eigen::Index>(dx.size()));
    dv = Q * xv;
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>()),
                          rhs, y, 0.0, 1.0, 1e-3);
  double gap = 0.0;
  for (std::int64_t x = -W; x <= W; ++x) {
    const double o = y[static_cast<std::size_t>(x + W)];
    gap = std::max(gap, std::fabs(s(0, x) - o) / o);
  }
  EXPECT_LE(gap, 1e-8);
}

TEST(SolveHeat, KilledModeWithExterior) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 12, GeneratorMode::killed);
  std::vector<double> u0(25, 1.0);
  const HeatSolution s = solve_heat(G, u0, {0.5, 2.0}, 1.0);
  for (std::int64_t x = -12; x <= 12; ++x) EXPECT_NEAR(s(1, x), 1.0, 1e-13);
  EXPECT_EQ(s.at(1)(100), 1.0);
}

TEST(HeatKernel, ShortTimeLimit) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 16, GeneratorMode::conservative);
  const HeatSolution p = heat_kernel(G, 3, {1e-10, 1e-6});
  EXPECT_NEAR(p(0, 3), 1.0, 1e-9);
  EXPECT_NEAR(p(1, 3), 1.0, 1e-5);
  EXPECT_THROW(heat_kernel(G, 17, {1.0}), InvalidArgument);
}

TEST(HeatKernel, SymmetryAndMass) {
  const std::int64_t W = 64;
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), W, GeneratorMode::conservative);
  const Eigen::MatrixXd P = propagator(G, 1.0);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::int64_t> site(-W, W);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t x = site(rng), y = site(rng);
    EXPECT_NEAR(P(G.index(x), G.index(y)), P(G.index(y), G.index(x)), 1e-10);
  }
  const HeatSolution h = heat_kernel(G, 0, {0.1, 1.0, 10.0});
  for (std::size_t ti = 0; ti < 3; ++ti) EXPECT_NEAR(h.values[ti].sum(), 1.0, 1e-8);
}

TEST(HeatKernel, SemigroupLaw) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 64, GeneratorMode::conservative);
  const Eigen::MatrixXd P05 = propagator(G, 0.5);
  const Eigen::MatrixXd P1 = propagator(G, 1.0);
  const Eigen::MatrixXd C = P05 * P05;
  double gap = 0.0;
  for (std::int64_t x = -16; x <= 16; ++x) {
    for (std::int64_t y = -16; y <= 16; ++y) {
      gap = std::max(gap, std::fabs(C(G.index(x), G.index(y)) - P1(G.index(x), G.index(y))));
    }
  }
  EXPECT_LE(gap, 1e-8);
}

TEST(HeatKernel, WindowEnlargementStability) {
  // killed mode, as used by the Li-Yau verifier; the conservative generator suppresses
  // out-of-window jumps at rate ~ 2 W^{-beta} / beta and drifts by O(1e-4) here
  const Kernel k = Kernel::power(1.5);
  const GeneratorMatrix a = build_generator(k, 64, GeneratorMode::killed);
  const GeneratorMatrix b = build_generator(k, 128, GeneratorMode::killed);
  for (double t : {0.5, 2.0}) {
    const Eigen::MatrixXd Pa = propagator(a, t), Pb = propagator(b, t);
    double gap = 0.0;
    for (std::int64_t x = -16; x <= 16; ++x) {
      for (std::int64_t y = -16; y <= 16; ++y) {
        gap = std::max(gap, std::fabs(Pa(a.index(x), a.index(y)) - Pb(b.index(x), b.index(y))));
      }
    }
    EXPECT_LE(gap, 1e-6) << t;
  }
}

TEST(HeatKernel, KilledBelowConservative) {
  const Kernel k = Kernel::power(1.5);
  const GeneratorMatrix c = build_generator(k, 32, GeneratorMode::conservative);
  const GeneratorMatrix d = build_generator(k, 32, GeneratorMode::killed);
  for (double t : {0.3, 3.0}) {
    const Eigen::MatrixXd D = propagator(c, t) - propagator(d, t);
    EXPECT_GE(D.minCoeff(), -1e-15) << t;
  }
}

TEST(HeatSolution, TimeDerivative) {
  const GeneratorMatrix G = build_generator(Kernel::power(1.5), 8, GeneratorMode::conservative);
  const HeatSolution h = heat_kernel(G, 0, {0.5 - 1e-4, 0.5, 0.5 + 1e-4});
  const Eigen::VectorXd d = h.time_derivative(G, 1);
  const Eigen::VectorXd fd = (h.values[2] - h.values[0]) / 2e-4;
  // centred-difference error is h^2 |Q^3 u| / 6 with |Q| <= 2 |k|_1
  EXPECT_LE((d - fd).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(HeatSolution, CsvLayout) {
  const GeneratorMatrix G = build_generator(Kernel::finite({1.0}), 1, GeneratorMode::conservative);
  const HeatSolution h = heat_kernel(G, 0, {1.0});
  std::ostringstream os;
  h.write_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.front(), '#');
  EXPECT_NE(s.find("\nt,x,value\n"), std::string::npos);
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  EXPECT_EQ(lines, 2u + 3u);
}
