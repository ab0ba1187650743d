// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar layer: Upsilon(r) = e^r - 1 - r and the profile
// H(x) = e^{-x} Upsilon(2x) / 2 with its derivative and inverse derivative.

namespace jumpcd {

double upsilon(double x);

// e^{-x} Upsilon(x + y) / 2
double H_pair(double x, double y);

double H_eval(double x);
double H_prime(double x);
double H_second(double x);

// Inverse of H' on [0, inf). Throws DomainError for y < 0.
double H_prime_inv(double y);

struct NuCertificate {
  double nu = 0.0;          // inflated constant actually returned
  double supremum = 0.0;    // grid supremum of the certified ratio
  double argmax = 0.0;      // grid maximiser (signed)
  double negative_sup = 0.0;  // supremum restricted to x < 0
  double x_max = 0.0;       // grid extent
  int grid_points = 0;
};

// Certified constant nu with |x|^gamma <= nu * H(x) for x != 0 (gamma >= 2).
NuCertificate nu_certificate(double gamma);
double nu_constant(double gamma);

// Certified constant with |y|^gamma <= nu * H_pair(x, y) for x, y >= 0 (gamma >= 2).
// Differs from nu_certificate: at gamma = 2 it is 4.2 (the limit of 2y^2/Upsilon(y) at 0, inflated).
NuCertificate nu_pair_certificate(double gamma);

}  // namespace jumpcd
