// Batch front-end: wulff run <config.yaml> [--output DIR] [--seed N]
// [--threads N] [--override key=value ...]
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 for
// usage or configuration errors, 3 when the outputs cannot be written.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wulff/errors.hpp"
#include "wulff/io.hpp"
#include "wulff/scenarios.hpp"

namespace {

std::string output_dir(const std::string& flag, const wulff::RunConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("WULFF_OUTPUT_DIR"); env && *env) {
    return std::string(env) + "/" + wulff::to_string(config.scenario);
  }
  return std::string("wulff_out/") + wulff::to_string(config.scenario);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of anisotropic overdetermined transport problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  long long seed = -1;
  int threads = 0;
  std::vector<std::string> overrides;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Execute the scenario described by a YAML configuration");
  run->add_option("config", config_path, "Path to the run configuration")->required();
  run->add_option("--output,-o", out_flag,
                  "Output directory (default: config output_dir, then $WULFF_OUTPUT_DIR/<scenario>)");
  run->add_option("--seed", seed, "Override the configuration seed")->check(CLI::NonNegativeNumber);
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--override", overrides, "Dot-path override key=value (repeatable)");
  run->add_flag("--quiet,-q", quiet, "Print only the final result line");

  CLI11_PARSE(app, argc, argv);

  wulff::RunConfig config;
  try {
    config = wulff::load_config(config_path, overrides);
  } catch (const wulff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) config.threads = threads;
  const std::string dir = output_dir(out_flag, config);

  const wulff::ScenarioResult result = wulff::run_scenario(config);
  if (!quiet) {
    for (const auto& c : result.checks) std::cout << wulff::summary_line(c) << "\n";
    for (const auto& n : result.notes) std::cout << "NOTE " << n << "\n";
  }
  std::cout << "RESULT " << (result.pass() ? "PASS" : "FAIL") << " " << wulff::to_string(result.scenario) << " ("
            << result.checks.size() << " checks, " << result.seconds << " s) -> " << dir << "\n";

  try {
    wulff::write_outputs(result, config, dir);
  } catch (const wulff::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return result.pass() ? 0 : 1;
}
