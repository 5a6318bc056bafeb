#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "wzmap/evaluation.hpp"
#include "wzmap/gmm.hpp"
#include "wzmap/planner.hpp"
#include "wzmap/trajectory.hpp"
#include "wzmap/vehicle_sim.hpp"
#include "wzmap/workzone.hpp"

namespace wzmap {

struct TrajectoryConfig {
  SynthesisParams synth;  // synth.n trajectories are generated
  int use = 5;            // the first `use` (by vehicle id) feed the fit
};

struct GmmConfig {
  int k_min = 1;
  int k_max = 20;
  EmOptions em{1e-6, 500, 1};
  double confidence = 0.95;
  long n_samples = 5000;
  std::uint64_t sample_seed = 2;
};

struct GridConfig {
  double resolution = 0.1;
  double footprint_side = 1.85;
  double inflation_radius = 0.7;
  double cone_radius = 0.2;
  double margin = 2.0;  // padding around the road for every grid
};

struct PlanConfig {
  PlannerParams params;
  // Start and goal sit on the closed-lane centre this far from either end.
  double start_offset = 20.0;
  double goal_offset = 20.0;
};

struct SimConfig {
  VehicleParams vehicle;
  double path_step = 0.5;
  double horizon = 120.0;
};

struct PipelineConfig {
  WorkZoneSpec workzone;
  TrajectoryConfig trajectory;
  GmmConfig gmm;
  GridConfig grid;
  PlanConfig planner;
  SimConfig sim;
  EvaluationParams evaluation;
  std::string output_dir = "out";

  // Throws Error(kConfigParse) on out-of-range values.
  void Validate() const;
};

// Parses TOML text over the defaults. Unknown sections or keys and wrongly
// typed values raise Error(kConfigParse).
PipelineConfig ParseConfig(std::string_view toml_text, std::string_view source = "<config>");

// "default" yields the built-in defaults; anything else is read as a file.
PipelineConfig LoadConfig(const std::string& path_or_default);

// Overrides every seed in the config.
void ApplySeed(PipelineConfig& config, std::uint64_t seed);

}  // namespace wzmap
