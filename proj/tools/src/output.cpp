// SPDX-License-Identifier: Apache-2.0
#include "output.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace jumpcd::cli {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    if (!os.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

void CsvTable::row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw std::logic_error("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += fmt17(values[i]);
  }
  body_ += '\n';
}

std::string CsvTable::str() const {
  std::string head;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) head += ',';
    head += columns_[i];
  }
  return head + '\n' + body_;
}

Artifacts write_outputs(const json& cfg, const json& result, const std::string& csv) {
  const std::filesystem::path dir(get_text(cfg, "out_dir"));
  const std::string stem = get_text(cfg, "name");
  Artifacts a;
  a.json_path = (dir / (stem + ".json")).string();
  write_atomic(a.json_path, json{{"config", cfg}, {"result", result}}.dump(2) + "\n");
  if (!csv.empty()) {
    a.csv_path = (dir / (stem + ".csv")).string();
    write_atomic(a.csv_path, csv);
  }
  return a;
}

}  // namespace jumpcd::cli
