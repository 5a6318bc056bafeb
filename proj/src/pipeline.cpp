#include "wzmap/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wzmap {

namespace fs = std::filesystem;

namespace {

fs::path Require(const fs::path& out_dir, const char* name) {
  const fs::path p = out_dir / name;
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kMissingArtifact, "missing artifact " + p.string());
  }
  return p;
}

nlohmann::json ReadJson(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, p.string() + ": " + e.what());
  }
}

void WriteJson(const nlohmann::json& j, const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + p.string());
}

WorkZoneLayout ReadLayout(const fs::path& out_dir) {
  const fs::path p = Require(out_dir, artifact::kLayout);
  try {
    return ReadJson(p).get<WorkZoneLayout>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, p.string() + ": " + e.what());
  }
}

OccupancyGrid ReadMap(const fs::path& out_dir, const char* name) {
  const fs::path p = Require(out_dir, name);
  if (!fs::exists(SidecarPath(p))) {
    throw Error(ErrorCode::kMissingArtifact, "missing artifact " + SidecarPath(p).string());
  }
  return LoadPgm(p);
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::string StageGenWorkzone(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = BuildLayout(c.workzone);
  WriteJson(layout, out / artifact::kLayout);
  return Format("gen-workzone: tapers %.3f/%.3f/%.3f m, %zu cones, road %.1f m",
                layout.merging_taper, layout.shifting_taper, layout.shoulder_taper,
                layout.cones.size(), layout.road_length);
}

std::string StageSynthTraj(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = ReadLayout(out);
  const auto trajs = Synthesize(layout, c.trajectory.synth);
  SaveTrajectoriesCsv(trajs, out / artifact::kTrajectories);
  const std::size_t per = trajs.empty() ? 0 : trajs.front().points.size();
  return Format("synth-traj: %zu trajectories x %zu points", trajs.size(), per);
}

std::string StageFitGmm(const PipelineConfig& c, const fs::path& out) {
  auto trajs = LoadTrajectoriesCsv(Require(out, artifact::kTrajectories));
  if (static_cast<int>(trajs.size()) > c.trajectory.use) trajs.resize(c.trajectory.use);
  const PointSet data = Flatten(trajs);
  const auto sel = SelectK(data, c.gmm.k_min, c.gmm.k_max, c.gmm.em);
  WriteJson(sel.mixture, out / artifact::kMixture);
  nlohmann::json report = {{"k_best", sel.k_best},
                           {"trajectories_used", trajs.size()},
                           {"points", data.rows()},
                           {"fit", sel.report},
                           {"table", sel.table}};
  WriteJson(report, out / artifact::kFitReport);
  return Format("fit-gmm: K=%d on %ld points from %zu trajectories, %d iterations, BIC %.3f",
                sel.k_best, static_cast<long>(data.rows()), trajs.size(),
                sel.report.iterations, sel.report.bic);
}

std::string StageSample(const PipelineConfig& c, const fs::path& out) {
  const fs::path p = Require(out, artifact::kMixture);
  Mixture mix;
  try {
    mix = ReadJson(p).get<Mixture>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, p.string() + ": " + e.what());
  }
  SamplingStats stats;
  const auto samples =
      SampleGated(mix, c.gmm.n_samples, c.gmm.confidence, c.gmm.sample_seed, &stats);
  SavePointsCsv(samples, out / artifact::kSamples);
  return Format("sample: %ld points, acceptance %.4f", static_cast<long>(samples.rows()),
                stats.draws > 0 ? static_cast<double>(stats.accepted) / stats.draws : 0.0);
}

std::string StageBuildMap(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = ReadLayout(out);
  const auto samples = LoadPointsCsv(Require(out, artifact::kSamples));
  const Box bounds = layout.Bounds(c.grid.margin);
  const OccupancyGrid crowd =
      FromSamples(samples, c.grid.footprint_side, bounds, c.grid.resolution);
  const OccupancyGrid truth = GroundTruthGrid(layout, bounds, c.grid.resolution);
  SavePgm(crowd, out / artifact::kCrowdMap);
  SavePgm(truth, out / artifact::kTruthMap);
  return Format("build-map: %dx%d cells, %ld free (truth %ld), precision %.4f", crowd.width(),
                crowd.height(), crowd.CountFree(), truth.CountFree(),
                Precision(crowd, truth));
}

std::string StageBuildBenchmarkMap(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = ReadLayout(out);
  const OccupancyGrid bench = FromObstacles(layout, c.grid.cone_radius,
                                            layout.Bounds(c.grid.margin), c.grid.resolution);
  SavePgm(bench, out / artifact::kBenchmarkMap);
  return Format("build-benchmark-map: %dx%d cells, %ld free", bench.width(), bench.height(),
                bench.CountFree());
}

std::string StagePlan(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = ReadLayout(out);
  const OccupancyGrid crowd = Inflate(ReadMap(out, artifact::kCrowdMap), c.grid.inflation_radius);
  const OccupancyGrid bench =
      Inflate(ReadMap(out, artifact::kBenchmarkMap), c.grid.inflation_radius);
  const Pose start{c.planner.start_offset, layout.closed_lane_center, 0.0};
  const Pose goal{layout.road_length - c.planner.goal_offset, layout.closed_lane_center, 0.0};
  PlanStats crowd_stats;
  PlanStats bench_stats;
  const ReferencePath crowd_path =
      HybridAStar(crowd, start, goal, c.planner.params, &crowd_stats);
  const ReferencePath bench_path =
      HybridAStar(bench, start, goal, c.planner.params, &bench_stats);
  SavePathCsv(crowd_path, out / artifact::kPath);
  SavePathCsv(bench_path, out / artifact::kBenchmarkPath);
  return Format("plan: crowd %.2f m (%ld expansions), benchmark %.2f m (%ld expansions)",
                crowd_path.Length(), crowd_stats.expansions, bench_path.Length(),
                bench_stats.expansions);
}

std::string StageSimulate(const PipelineConfig& c, const fs::path& out) {
  const ReferencePath raw = LoadPathCsv(Require(out, artifact::kPath));
  const ReferencePath path = Resample(raw, c.sim.path_step);
  const Pose& p0 = path.poses.front();
  const Trace trace = Simulate(path, {p0.x, p0.y, p0.heading, 0.0}, c.sim.vehicle, c.sim.horizon);
  SaveTraceCsv(trace, out / artifact::kTrace);
  const auto& last = trace.entries.back();
  return Format("simulate: %zu steps, t=%.2f s, final speed %.3f m/s, %s",
                trace.entries.size(), last.t, last.state.speed,
                trace.completed ? "reached path end" : "did not reach path end");
}

std::string StageEvaluate(const PipelineConfig& c, const fs::path& out) {
  const WorkZoneLayout layout = ReadLayout(out);
  const OccupancyGrid crowd = ReadMap(out, artifact::kCrowdMap);
  const OccupancyGrid bench = ReadMap(out, artifact::kBenchmarkMap);
  const OccupancyGrid truth = ReadMap(out, artifact::kTruthMap);
  const ReferencePath crowd_path = LoadPathCsv(Require(out, artifact::kPath));
  const ReferencePath bench_path = LoadPathCsv(Require(out, artifact::kBenchmarkPath));
  Trace trace = LoadTraceCsv(Require(out, artifact::kTrace));
  if (!trace.entries.empty() && !crowd_path.poses.empty()) {
    const auto& e = trace.entries.back();
    trace.completed =
        (Eigen::Vector2d(e.state.x, e.state.y) - crowd_path.poses.back().position()).norm() <
        1.0;
  }
  const EvaluationReport report = EvaluateScenario(crowd, bench, truth, crowd_path, bench_path,
                                                   trace, layout, c.evaluation);
  WriteJson(report, out / artifact::kReport);
  SaveClearanceCsv(report.clearance, out / artifact::kClearance);
  return Format(
      "evaluate: precision %.4f, min cone %.3f m, min boundary %.3f m, fluctuation %.3f m, "
      "violations crowd=%s benchmark=%s",
      report.precision, report.clearance.min_cone_distance,
      report.clearance.min_boundary_distance, report.clearance.cone_fluctuation,
      report.crowdsourced_violates ? "yes" : "no", report.benchmark_violates ? "yes" : "no");
}

}  // namespace

const std::vector<Stage>& Stages() {
  static const std::vector<Stage> stages = {
      {"gen-workzone", StageGenWorkzone},
      {"synth-traj", StageSynthTraj},
      {"fit-gmm", StageFitGmm},
      {"sample", StageSample},
      {"build-map", StageBuildMap},
      {"build-benchmark-map", StageBuildBenchmarkMap},
      {"plan", StagePlan},
      {"simulate", StageSimulate},
      {"evaluate", StageEvaluate},
  };
  return stages;
}

std::string RunStage(std::string_view name, const PipelineConfig& config,
                     const fs::path& out_dir) {
  for (const auto& stage : Stages()) {
    if (stage.name != name) continue;
    try {
      fs::create_directories(out_dir);
      return stage.run(config, out_dir);
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(stage.name, e);
    } catch (const fs::filesystem_error& e) {
      throw StageError(stage.name, Error(ErrorCode::kIoError, e.what()));
    }
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown stage " + std::string(name));
}

void SavePointsCsv(const Points2<double>& points, const fs::path& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (f == nullptr) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  std::fputs("x,y\n", f);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::fprintf(f, "%.9f,%.9f\n", points(i, 0), points(i, 1));
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::kIoError, "failed writing " + file.string());
}

Points2<double> LoadPointsCsv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  std::vector<Eigen::Vector2d> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "x,y") throw Error(ErrorCode::kParseError, file.string() + ":1: expected x,y");
      continue;
    }
    double x = 0.0;
    double y = 0.0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf%c", &x, &y, &tail) != 2) {
      throw Error(ErrorCode::kParseError,
                  file.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    rows.emplace_back(x, y);
  }
  Points2<double> out(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = rows[i].transpose();
  return out;
}

}  // namespace wzmap
