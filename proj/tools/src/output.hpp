// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace jumpcd::cli {

// 17 significant digits, so every double round-trips.
std::string fmt17(double v);

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string body_;
};

struct Artifacts {
  std::string json_path;
  std::string csv_path;
};

// Writes <out_dir>/<name>.json holding {"config": cfg, "result": result} and, when csv is
// non-empty, <out_dir>/<name>.csv.
Artifacts write_outputs(const json& cfg, const json& result, const std::string& csv);

}  // namespace jumpcd::cli
