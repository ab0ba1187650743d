// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "config.hpp"

namespace jumpcd::cli {

enum ExitCode { kSuccess = 0, kUsage = 1, kViolation = 2 };

struct Outcome {
  int exit = kSuccess;
  json result;
  std::string csv;
  std::string message;  // reason for a non-success exit
};

// Runs a resolved config; throws on invalid input.
Outcome run_command(const json& cfg);

}  // namespace jumpcd::cli
