// Command-line driver for the work-zone mapping pipeline.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wzmap/config.hpp"
#include "wzmap/pipeline.hpp"

namespace {

int ExitCode(wzmap::ErrorCode code) {
  switch (code) {
    case wzmap::ErrorCode::kConfigParse: return 2;
    case wzmap::ErrorCode::kMissingArtifact: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infer work-zone drivable area from vehicle trajectories, plan and track through it"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path = "default";
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "TOML config file, or 'default'");
  app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "Seed for every random stage (overrides config)");
  app.add_flag("--quiet", quiet, "Suppress per-stage summaries");

  std::vector<std::string> order;
  for (const auto& stage : wzmap::Stages()) {
    app.add_subcommand(stage.name, "Run the " + stage.name + " stage");
    order.push_back(stage.name);
  }
  app.add_subcommand("run-all", "Run every stage in order");

  CLI11_PARSE(app, argc, argv);

  try {
    wzmap::PipelineConfig config = wzmap::LoadConfig(config_path);
    if (seed) wzmap::ApplySeed(config, *seed);
    const std::filesystem::path out = out_dir.empty() ? config.output_dir : out_dir;

    const std::string chosen = app.get_subcommands().front()->get_name();
    std::vector<std::string> to_run;
    if (chosen == "run-all") {
      to_run = order;
    } else {
      to_run = {chosen};
    }
    for (const auto& name : to_run) {
      const std::string summary = wzmap::RunStage(name, config, out);
      if (!quiet) std::cout << summary << std::endl;
    }
  } catch (const wzmap::Error& e) {
    std::cerr << "error [" << wzmap::ErrorCodeName(e.code()) << "] " << e.what() << std::endl;
    return ExitCode(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
