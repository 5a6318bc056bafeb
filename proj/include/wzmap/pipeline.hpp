#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wzmap/config.hpp"
#include "wzmap/error.hpp"

namespace wzmap {

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kLayout = "layout.json";
inline constexpr const char* kTrajectories = "trajectories.csv";
inline constexpr const char* kMixture = "mixture.json";
inline constexpr const char* kFitReport = "fit_report.json";
inline constexpr const char* kSamples = "samples.csv";
inline constexpr const char* kCrowdMap = "crowd_map.pgm";
inline constexpr const char* kTruthMap = "truth_map.pgm";
inline constexpr const char* kBenchmarkMap = "benchmark_map.pgm";
inline constexpr const char* kPath = "path.csv";
inline constexpr const char* kBenchmarkPath = "benchmark_path.csv";
inline constexpr const char* kTrace = "trace.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kClearance = "clearance.csv";
}  // namespace artifact

// A library error tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Each stage reads its inputs from `out_dir`, writes its outputs there and
// returns a one-line summary.
using StageFn = std::function<std::string(const PipelineConfig&, const std::filesystem::path&)>;

struct Stage {
  std::string name;
  StageFn run;
};

// Stages in pipeline order.
const std::vector<Stage>& Stages();

// Runs one named stage, wrapping failures in StageError.
std::string RunStage(std::string_view name, const PipelineConfig& config,
                     const std::filesystem::path& out_dir);

// Saves/loads 2-column `x,y` point files.
void SavePointsCsv(const Points2<double>& points, const std::filesystem::path& file);
Points2<double> LoadPointsCsv(const std::filesystem::path& file);

}  // namespace wzmap
