// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace jumpcd::cli {
namespace {

json default_out_dir() {
  const char* env = std::getenv("JUMPCD_OUT_DIR");
  return (env && *env) ? json(env) : json(".");
}

std::vector<OptionDef> with_output(std::vector<OptionDef> opts, const std::string& stem) {
  opts.push_back({"out_dir", OptKind::text, default_out_dir(),
                  "output directory (default $JUMPCD_OUT_DIR or .)"});
  opts.push_back({"name", OptKind::text, stem, "file stem of the written outputs"});
  return opts;
}

const json kLagrange = {{"kind", "lagrange"}, {"params", json::object()}};

std::vector<CommandDef> build_table() {
  std::vector<CommandDef> t;
  t.push_back({"kernel-info", "kernel aggregates and structural conditions",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON", true},
                            {"radius", OptKind::integer, 1000, "window for condition checks"},
                            {"tol", OptKind::number, 1e-10, "absolute tolerance of aggregates"}},
                           "kernel-info")});
  t.push_back({"cd-table", "CD-function values on a list of arguments",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON"},
                            {"cd", OptKind::object, kLagrange, "CD spec JSON"},
                            {"a", OptKind::number_list, nullptr, "arguments, comma separated", true}},
                           "cd-table")});
  t.push_back({"relaxation-table", "relaxation function on a time grid",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON"},
                            {"cd", OptKind::object, nullptr, "CD spec JSON", true},
                            {"times", OptKind::number_list, nullptr, "explicit times"},
                            {"t_min", OptKind::number, 1e-4, "log grid start"},
                            {"t_max", OptKind::number, 100.0, "log grid end"},
                            {"points", OptKind::integer, 200, "log grid size"}},
                           "relaxation-table")});
  t.push_back({"heat-solve", "heat equation on a truncated window",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON", true},
                            {"window", OptKind::integer, 64, "half width W"},
                            {"mode", OptKind::text, "conservative", "conservative or killed"},
                            {"times", OptKind::number_list, nullptr, "output times", true},
                            {"initial", OptKind::object, json{{"type", "indicator"}, {"x0", 0}},
                             "initial datum JSON"}},
                           "heat-solve")});
  t.push_back({"liyau-check", "differential Harnack verification with window doubling",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON", true},
                            {"cd", OptKind::object, kLagrange, "CD spec JSON"},
                            {"window", OptKind::integer, 64, "half width W"},
                            {"mode", OptKind::text, "killed", "conservative or killed"},
                            {"times", OptKind::number_list, nullptr, "check times", true},
                            {"interior", OptKind::integer, 0, "checked radius (0: W/4)"},
                            {"tolerance", OptKind::number, 1e-9, "relative margin tolerance"},
                            {"initial", OptKind::object,
                             json{{"type", "delta_plus_constant"}, {"x0", 0}, {"height", 1.0},
                                  {"constant", 1.0}},
                             "initial datum JSON"}},
                           "liyau-check")});
  t.push_back({"cd-search", "adversarial search for violations of CD(0, F)",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON", true},
                            {"cd", OptKind::object, kLagrange, "CD spec JSON"},
                            {"window", OptKind::integer, 24, "half width W"},
                            {"budget", OptKind::integer, 10000, "candidate count"},
                            {"seed", OptKind::integer, 1, "random seed"},
                            {"tolerance", OptKind::number, 1e-9, "relative margin tolerance"}},
                           "cd-search")});
  t.push_back({"harnack-opt", "optimal Harnack path between two sites",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON", true},
                            {"from", OptKind::integer, nullptr, "start site", true},
                            {"to", OptKind::integer, nullptr, "end site", true},
                            {"window_ext", OptKind::integer, 0, "sites allowed beyond the endpoints"},
                            {"n_max", OptKind::integer, 0, "step limit (0: automatic)"}},
                           "harnack-opt")});
  t.push_back({"heat-bounds", "two-sided heat kernel bounds",
               with_output({{"kernel", OptKind::object, nullptr, "kernel spec JSON (supplies k1, l1)"},
                            {"c", OptKind::number, nullptr, "CD constant c", true},
                            {"gamma", OptKind::number, nullptr, "CD exponent gamma", true},
                            {"delta", OptKind::number, nullptr, "CD parameter delta", true},
                            {"nu", OptKind::number, nullptr, "dimension constant (default: derived)"},
                            {"k1", OptKind::number, nullptr, "k(1)"},
                            {"l1", OptKind::number, nullptr, "|k|_1"},
                            {"times", OptKind::number_list, nullptr, "times", true},
                            {"distances", OptKind::number_list, json::array({0}), "|x - y| values"}},
                           "heat-bounds")});
  return t;
}

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw UsageError("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

void check_kind(const OptionDef& def, const json& v) {
  bool ok = false;
  switch (def.kind) {
    case OptKind::number: ok = v.is_number(); break;
    case OptKind::integer:
      ok = v.is_number_integer() ||
           (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
      break;
    case OptKind::text: ok = v.is_string(); break;
    case OptKind::object: ok = v.is_object(); break;
    case OptKind::number_list:
      ok = v.is_array() && !v.empty();
      for (const auto& e : v) ok = ok && e.is_number();
      break;
  }
  if (!ok) throw UsageError("option '" + def.key + "' has the wrong type");
}

}  // namespace

const std::vector<CommandDef>& command_table() {
  static const std::vector<CommandDef> table = build_table();
  return table;
}

const CommandDef& find_command(const std::string& name) {
  for (const auto& c : command_table()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

json parse_flag(const OptionDef& def, const std::string& text) {
  switch (def.kind) {
    case OptKind::number: return split_numbers(text).at(0);
    case OptKind::integer: {
      const double v = split_numbers(text).at(0);
      if (std::floor(v) != v) throw UsageError("--" + def.key + " expects an integer");
      return static_cast<std::int64_t>(v);
    }
    case OptKind::text: return text;
    case OptKind::object: {
      json j = json::parse(text, nullptr, false);
      if (j.is_discarded()) throw UsageError("--" + def.key + " is not valid JSON");
      return j;
    }
    case OptKind::number_list: return split_numbers(text);
  }
  return nullptr;
}

json resolve_config(const CommandDef& cmd, const json& file_config, const json& flags) {
  json cfg = json::object();
  if (!file_config.is_null()) {
    if (!file_config.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [k, v] : file_config.items()) {
      if (k == "command") {
        if (v != cmd.name) throw UsageError("config is for command " + v.dump());
        continue;
      }
      cfg[k] = v;
    }
  }
  for (const auto& [k, v] : flags.items()) cfg[k] = v;
  for (const auto& [k, v] : cfg.items()) {
    bool known = false;
    for (const auto& d : cmd.options) known = known || d.key == k;
    if (!known) throw UsageError("unknown option '" + k + "' for " + cmd.name);
  }
  for (const auto& d : cmd.options) {
    if (!cfg.contains(d.key) && !d.fallback.is_null()) cfg[d.key] = d.fallback;
    if (!cfg.contains(d.key)) {
      if (d.required) throw UsageError("missing required option '" + d.key + "'");
      continue;
    }
    check_kind(d, cfg[d.key]);
  }
  cfg["command"] = cmd.name;
  return cfg;
}

double get_number(const json& cfg, const std::string& key) { return cfg.at(key).get<double>(); }

std::int64_t get_integer(const json& cfg, const std::string& key) {
  return static_cast<std::int64_t>(cfg.at(key).get<double>());
}

std::string get_text(const json& cfg, const std::string& key) {
  return cfg.at(key).get<std::string>();
}

std::vector<double> get_numbers(const json& cfg, const std::string& key) {
  return cfg.at(key).get<std::vector<double>>();
}

Kernel kernel_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw UsageError("kernel spec needs a string field 'family'");
  }
  KernelSpec spec;
  spec.family = j["family"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw UsageError("kernel 'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (k == "values" && v.is_array()) {
        for (const auto& e : v) {
          if (!e.is_number()) throw UsageError("kernel values must be numbers");
          spec.values.push_back(e.get<double>());
        }
      } else if (v.is_number()) {
        spec.params[k] = v.get<double>();
      } else {
        throw UsageError("kernel parameter '" + k + "' must be a number");
      }
    }
  }
  return make_kernel(spec);
}

CDFunction cd_from_json(const json& j, const std::optional<Kernel>& kernel) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw UsageError("CD spec needs a string field 'kind'");
  }
  CDSpec spec;
  spec.kind = j["kind"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw UsageError("CD 'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      if (!v.is_number()) throw UsageError("CD parameter '" + k + "' must be a number");
      spec.params[k] = v.get<double>();
    }
  }
  return make_cd(spec, kernel);
}

GeneratorMode mode_from_json(const json& cfg) {
  return generator_mode_from_string(get_text(cfg, "mode"));
}

}  // namespace jumpcd::cli
