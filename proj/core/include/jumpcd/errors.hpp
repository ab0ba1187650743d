// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace jumpcd {

// Bad parameters or violated preconditions supplied by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a scalar function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A weighted kernel series that provably diverges.
class DivergentSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The kernel does not satisfy the hypotheses an operation relies on.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine could not reach its accuracy target.
class AccuracyFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No admissible object exists for the request (e.g. no Harnack path).
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jumpcd
