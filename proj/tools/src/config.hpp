// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpcd/cdfun.hpp"
#include "jumpcd/heat.hpp"
#include "jumpcd/kernel.hpp"

namespace jumpcd::cli {

using json = nlohmann::json;

// Invalid flags or config values; reported as exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptKind { number, integer, text, object, number_list };

struct OptionDef {
  std::string key;  // config key; the flag is --key with '_' spelled '-'
  OptKind kind;
  json fallback;    // default value; null means no default
  std::string help;
  bool required = false;
};

struct CommandDef {
  std::string name;
  std::string help;
  std::vector<OptionDef> options;
};

const std::vector<CommandDef>& command_table();
const CommandDef& find_command(const std::string& name);

// Converts a flag's text to the JSON value of its kind ("0.5,2,8" for lists, raw JSON for objects).
json parse_flag(const OptionDef& def, const std::string& text);

// Merges config file, then flags, then defaults; checks types and unknown keys.
json resolve_config(const CommandDef& cmd, const json& file_config, const json& flags);

// Typed accessors on a resolved config.
double get_number(const json& cfg, const std::string& key);
std::int64_t get_integer(const json& cfg, const std::string& key);
std::string get_text(const json& cfg, const std::string& key);
std::vector<double> get_numbers(const json& cfg, const std::string& key);

Kernel kernel_from_json(const json& j);
CDFunction cd_from_json(const json& j, const std::optional<Kernel>& kernel);
GeneratorMode mode_from_json(const json& cfg);

}  // namespace jumpcd::cli
