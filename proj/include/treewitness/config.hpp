#pragma once

// Run configuration for the command line front end.  A config names the
// acting group, the shift elements and support radii to sweep, the window
// policy (auto picks n = i + k + 2 so every region is populated), the
// checks to run, and where reports go.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "group.hpp"

namespace treewitness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string group = "line";
  std::vector<std::string> gamma1 = {"t^1"};
  std::vector<std::int64_t> i_values = {2, 4, 8};
  std::optional<std::int64_t> window_n;  // absent: derive n = i + k + 2
  std::int64_t stability_span = 4;       // stability sweeps n .. n + span
  std::set<std::string> checks = {"positivity", "gram", "defect", "stability", "bridge"};
  std::string out_dir = "reports";
  std::string format = "csv";
  int jobs = 1;

  bool enabled(const std::string& check) const { return checks.count(check) != 0; }
};

inline const std::set<std::string>& known_checks() {
  static const std::set<std::string> names = {"positivity", "gram", "defect",
                                              "stability", "bridge"};
  return names;
}

inline void validate_run_config(const RunConfig& config) {
  GroupAction action = [&] {
    try {
      return GroupAction::from_name(config.group);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }();
  if (config.gamma1.empty()) throw ConfigError("config: gamma1 list is empty");
  for (const std::string& text : config.gamma1) {
    try {
      action.parse_element(text);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (config.i_values.empty()) throw ConfigError("config: i list is empty");
  for (std::int64_t i : config.i_values)
    if (i < 1) throw ConfigError("config: support radius i must be at least 1");
  if (config.window_n && *config.window_n < 1)
    throw ConfigError("config: explicit n must be at least 1");
  if (config.stability_span < 0 || config.stability_span > 16)
    throw ConfigError("config: stability span out of range");
  for (const std::string& check : config.checks)
    if (!known_checks().count(check))
      throw ConfigError("config: unknown check '" + check + "'");
  if (config.format != "csv" && config.format != "json")
    throw ConfigError("config: format must be csv or json");
  if (config.jobs < 1 || config.jobs > 64)
    throw ConfigError("config: jobs must be between 1 and 64");
}

inline RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "group") {
        if (value.is_string()) config.group = value.get<std::string>();
        else if (value.is_object()) {
          std::string family = value.at("family").get<std::string>();
          if (family == "free")
            family += ":" + std::to_string(value.value("rank", 2));
          config.group = family;
        } else throw ConfigError("config: group must be a string or object");
      } else if (key == "gamma1") {
        config.gamma1 = value.get<std::vector<std::string>>();
      } else if (key == "i") {
        config.i_values = value.get<std::vector<std::int64_t>>();
      } else if (key == "n") {
        if (value.is_string()) {
          if (value.get<std::string>() != "auto")
            throw ConfigError("config: n must be \"auto\" or an integer");
          config.window_n.reset();
        } else config.window_n = value.get<std::int64_t>();
      } else if (key == "stability_span") {
        config.stability_span = value.get<std::int64_t>();
      } else if (key == "checks") {
        config.checks.clear();
        for (const auto& name : value) config.checks.insert(name.get<std::string>());
      } else if (key == "out") {
        config.out_dir = value.get<std::string>();
      } else if (key == "format") {
        config.format = value.get<std::string>();
      } else if (key == "jobs") {
        config.jobs = value.get<int>();
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
  validate_run_config(config);
  return config;
}

inline nlohmann::ordered_json config_echo(const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["group"] = config.group;
  doc["gamma1"] = config.gamma1;
  doc["i"] = config.i_values;
  if (config.window_n) doc["n"] = *config.window_n;
  else doc["n"] = "auto";
  doc["stability_span"] = config.stability_span;
  doc["checks"] = std::vector<std::string>(config.checks.begin(), config.checks.end());
  doc["out"] = config.out_dir;
  doc["format"] = config.format;
  doc["jobs"] = config.jobs;
  return doc;
}

}  // namespace treewitness
