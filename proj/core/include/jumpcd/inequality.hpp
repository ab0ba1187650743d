// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/kernel.hpp"
#include "jumpcd/operators.hpp"

namespace jumpcd {

struct MarginReport {
  std::string inequality;
  // Absolute margin LHS - RHS and its relative form margin / max(1, RHS) at the worst point.
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_relative = std::numeric_limits<double>::infinity();
  std::string witness;
  std::optional<LatticeFunction> witness_function;
  double witness_t = 0.0;
  std::int64_t witness_x = 0;
  std::size_t evaluated = 0;
  std::size_t negative = 0;  // points with relative margin below -tolerance
  double tolerance = 0.0;
  std::map<std::string, double> settings;

  bool pass() const { return worst_relative >= -tolerance; }
};

// Search over u on [-W, W] with u(0) = 0 for the smallest
// Psi2(u)(0) - F(max(-Lu(0), 0)). Candidate i depends only on the seed and the
// candidates before it, so reports for a smaller budget are prefixes of larger ones.
MarginReport cd_adversarial(const Kernel& k, const CDFunction& F, std::int64_t W,
                            std::size_t budget, std::uint64_t seed, double tolerance = 1e-9);

struct DCertificate {
  double d = 0.0;  // sup of |Lu(0)|^gamma / Psi2(u)(0) over the search
  std::optional<LatticeFunction> witness;
  std::size_t evaluated = 0;
  std::vector<double> running_max;  // value after each candidate
};

DCertificate certify_d(const Kernel& k, double gamma, std::int64_t W, std::size_t budget,
                       std::uint64_t seed);

// power_cd with the constant above the golden ratio taken from certify_d at
// gamma = power_cd_exponent(beta, eps).
PowerCDResult certified_power_cd(double beta, double eps, PowerCDKernel which, std::int64_t W,
                                 std::size_t budget, std::uint64_t seed);

struct LiYauPoint {
  double t;
  std::int64_t x;
  double phi;
  double minus_Lv;  // -L log u
  double dt_v;      // d/dt log u on the truncated system
  double psi;       // Psi_Upsilon(log u)
  double margin1;   // phi - (-Lv)
  double margin2;   // dt_v - psi + phi
};

struct LiYauReport {
  MarginReport summary;
  std::vector<LiYauPoint> points;
};

// Checks -L log u <= phi(t) and d/dt log u >= Psi_Upsilon(log u) - phi(t) with
// phi = relaxation(2F) on |x| <= interior_radius. Killed mode evaluates L and
// Psi_Upsilon with the solution's exterior constant (which must be positive);
// conservative mode restricts the sums to the window.
LiYauReport liyau_report(const GeneratorMatrix& G, const CDFunction& F, const HeatSolution& sol,
                         std::int64_t interior_radius, double tolerance,
                         const RelaxationFunction* phi = nullptr);

// Largest change of any relative margin between two reports over the same (t, x) grid.
double max_margin_shift(const LiYauReport& a, const LiYauReport& b);

struct LiYauCertificate {
  LiYauReport base;
  LiYauReport doubled;
  double doubling_shift = 0.0;
  bool certified = false;  // both pass and doubling moves no margin by more than tolerance
};

// Runs the check on windows W and 2W with the same initial datum (a lattice
// function whose exterior becomes the killed-mode exterior constant).
LiYauCertificate certify_liyau(const Kernel& k, const CDFunction& F, const LatticeFunction& u0,
                               std::int64_t W, GeneratorMode mode,
                               const std::vector<double>& times, std::int64_t interior_radius,
                               double tolerance);

}  // namespace jumpcd
