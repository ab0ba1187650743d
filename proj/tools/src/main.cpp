// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "jumpcd/errors.hpp"
#include "output.hpp"

using namespace jumpcd;
using namespace jumpcd::cli;

namespace {

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
  return kUsage;
}

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config " + path);
  json j = json::parse(is, nullptr, false);
  if (j.is_discarded()) throw UsageError("config " + path + " is not valid JSON");
  return j;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& c : f) {
    if (c == '_') c = '-';
  }
  return "--" + f;
}

int run(const CommandDef& def, const std::string& config_path,
        const std::map<std::string, std::string>& given) {
  json flags = json::object();
  for (const auto& opt : def.options) {
    auto it = given.find(opt.key);
    if (it != given.end()) flags[opt.key] = parse_flag(opt, it->second);
  }
  const json file = config_path.empty() ? json() : read_config(config_path);
  const json cfg = resolve_config(def, file, flags);
  const Outcome out = run_command(cfg);
  const Artifacts a = write_outputs(cfg, out.result, out.csv);
  json doc = {{"config", cfg}, {"result", out.result}, {"outputs", {{"json", a.json_path}}}};
  if (!a.csv_path.empty()) doc["outputs"]["csv"] = a.csv_path;
  std::cout << doc.dump(2) << std::endl;
  if (out.exit == kViolation) std::cerr << json{{"violation", out.message}}.dump() << std::endl;
  if (out.exit == kUsage) return fail("inconclusive", out.message);
  return out.exit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-dimension calculus for jump operators on the integer lattice"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::string config_path;
  std::map<std::string, std::string> given;
  std::map<std::string, std::string> values;
  const CommandDef* chosen = nullptr;

  for (const auto& def : command_table()) {
    CLI::App* sub = app.add_subcommand(def.name, def.help);
    sub->add_option("--config", config_path, "JSON config with the same keys as the flags")
        ->check(CLI::ExistingFile);
    for (const auto& opt : def.options) {
      std::string help = opt.help;
      if (!opt.fallback.is_null()) help += " [default " + opt.fallback.dump() + "]";
      if (opt.required) help += " (required)";
      sub->add_option(flag_name(opt.key), values[def.name + "/" + opt.key], help);
    }
    sub->callback([&, sub, d = &def] {
      chosen = d;
      for (const auto& opt : d->options) {
        if (sub->count(flag_name(opt.key)) > 0) given[opt.key] = values[d->name + "/" + opt.key];
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    return run(*chosen, config_path, given);
  } catch (const UsageError& e) {
    return fail("usage", e.what());
  } catch (const InvalidArgument& e) {
    return fail("invalid_argument", e.what());
  } catch (const DomainError& e) {
    return fail("domain_error", e.what());
  } catch (const Refusal& e) {
    return fail("refusal", e.what());
  } catch (const Infeasible& e) {
    return fail("infeasible", e.what());
  } catch (const DivergentSeries& e) {
    return fail("divergent_series", e.what());
  } catch (const AccuracyFailure& e) {
    return fail("accuracy_failure", e.what());
  } catch (const json::exception& e) {
    return fail("config", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
