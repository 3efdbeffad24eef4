#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "treewitness/config.hpp"
#include "treewitness/runner.hpp"

namespace fs = std::filesystem;
using namespace treewitness;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format;
  int jobs = 0;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration");
  cmd->add_option("--out", opts.out_dir, "report directory (overrides config)");
  cmd->add_option("--format", opts.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", opts.jobs, "cells evaluated concurrently")
      ->check(CLI::Range(1, 64));
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("config: cannot open " + opts.config_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: " + opts.config_path + ": " + e.what());
    }
    config = parse_run_config(doc);
  }
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (!opts.format.empty()) config.format = opts.format;
  if (opts.jobs > 0) config.jobs = opts.jobs;
  validate_run_config(config);
  return config;
}

int write_reports(const RunOutput& out, const std::string& dir) {
  if (out.files.empty()) return 0;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create report directory " << dir << "\n";
    return 2;
  }
  for (const ReportFile& file : out.files) {
    fs::path path = fs::path(dir) / file.name;
    std::ofstream stream(path, std::ios::binary | std::ios::trunc);
    if (!stream) {
      std::cerr << "cannot write " << path.string() << "\n";
      return 2;
    }
    stream << file.content;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact workbench for boundary witnesses of groups acting on trees"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* verify = app.add_subcommand("verify", "witness checks over the configured cells");
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "independent count-based measurements");
  CLI::App* table_cmd =
      app.add_subcommand("defect-table", "pipeline and oracle defects side by side");
  CLI::App* demo_cmd =
      app.add_subcommand("corona-demo", "finite-stage sequence algebra walkthrough");
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "quick built-in checks");
  for (CLI::App* cmd : {verify, oracle_cmd, table_cmd, demo_cmd, selftest_cmd})
    attach_common(cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config = load_config(opts);
    RunOutput out;
    if (verify->parsed()) out = run_verify(config);
    else if (oracle_cmd->parsed()) out = run_oracle(config);
    else if (table_cmd->parsed()) out = run_defect_table(config);
    else if (demo_cmd->parsed()) out = run_corona_demo(config);
    else out = run_selftest();
    std::cout << out.summary;
    int write_status = write_reports(out, config.out_dir);
    if (write_status != 0) return write_status;
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "infeasible window: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
