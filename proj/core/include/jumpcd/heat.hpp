// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jumpcd/kernel.hpp"
#include "jumpcd/operators.hpp"

namespace jumpcd {

// conservative: jumps leaving the window are suppressed (rows sum to zero).
// killed: the full rate |k|_1 is kept on the diagonal, jumps leaving the window are lost.
enum class GeneratorMode { conservative, killed };
std::string to_string(GeneratorMode m);
GeneratorMode generator_mode_from_string(const std::string& s);

struct GeneratorMatrix {
  Kernel kernel;
  std::int64_t W = 0;
  GeneratorMode mode = GeneratorMode::conservative;
  Eigen::MatrixXd Q;     // index i <-> site i - W
  double rate = 0.0;     // uniformization rate, max_i |Q_ii|

  std::int64_t size() const { return 2 * W + 1; }
  std::size_t index(std::int64_t x) const { return static_cast<std::size_t>(x + W); }
};

GeneratorMatrix build_generator(const Kernel& k, std::int64_t W, GeneratorMode mode);

struct HeatSolution {
  std::int64_t W = 0;
  GeneratorMode mode = GeneratorMode::conservative;
  std::string kernel_label;
  std::string initial_record;
  // Killed mode solves for u - exterior, so u equals `exterior` outside the window.
  double exterior = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;  // values[i](x + W) = u(times[i], x)

  double operator()(std::size_t ti, std::int64_t x) const {
    return values[ti](static_cast<Eigen::Index>(x + W));
  }
  // Snapshot as a lattice function (exterior as above; 0 in conservative mode).
  LatticeFunction at(std::size_t ti) const;
  // Exact time derivative of u on the truncated system.
  Eigen::VectorXd time_derivative(const GeneratorMatrix& G, std::size_t ti) const;

  // Columns t, x, value; a leading comment row carries the generator metadata.
  void write_csv(std::ostream& os) const;
};

// u(t) = u_ext + exp(tQ)(u0 - u_ext) on the window, by uniformization: with P = I + Q/q,
// exp(tQ) = sum_n Poisson(n; qt) P^n, applied separately to the positive and
// negative parts of u0 - u_ext. Throws AccuracyFailure on a non-positive component.
// u_ext must be 0 in conservative mode.
HeatSolution solve_heat(const GeneratorMatrix& G, const std::vector<double>& u0,
                        const std::vector<double>& times, double u_ext = 0.0);

// p_t(x0, .) for t in times.
HeatSolution heat_kernel(const GeneratorMatrix& G, std::int64_t x0,
                         const std::vector<double>& times);

// exp(tQ) as a dense matrix (entry (x, y) = p_t(x, y)).
Eigen::MatrixXd propagator(const GeneratorMatrix& G, double t);

}  // namespace jumpcd
