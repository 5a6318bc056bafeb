// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "wzmap/config.hpp"
#include "wzmap/gmm.hpp"
#include "wzmap/gridmap.hpp"
#include "wzmap/pipeline.hpp"
#include "wzmap/planner.hpp"
#include "wzmap/vehicle_sim.hpp"
#include "wzmap/workzone.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal P2 reader: returns pixel rows, 255 = free.
std::vector<std::vector<int>> ReadPgmPixels(const fs::path& p) {
  std::istringstream in(ReadFile(p));
  std::string magic;
  int w = 0, h = 0, maxv = 0;
  in >> magic;
  auto skip_comments = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string line;
      std::getline(in, line);
      in >> std::ws;
    }
  };
  skip_comments();
  in >> w;
  skip_comments();
  in >> h;
  skip_comments();
  in >> maxv;
  std::vector<std::vector<int>> px(h, std::vector<int>(w));
  for (auto& row : px) {
    for (auto& v : row) in >> v;
  }
  return px;
}


// Reads numeric CSV columns after a header line.
std::vector<std::vector<double>> ReadCsv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(cell.empty() ? NAN : std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

std::vector<Eigen::Vector2d> JsonPoints(const nlohmann::json& j) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

double SegDist(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double PolyDist(const std::vector<Eigen::Vector2d>& line, const Eigen::Vector2d& p) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, SegDist(p, line[i], line[i + 1]));
  return best;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(WZMAP_BIN) + " " + args + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Shared scenario run, stage by stage, in a scratch directory.
struct Scenario {
  fs::path dir;
  wzmap::PipelineConfig config;
  double map_seconds = 0.0;   // gen-workzone .. build-map
  double plan_seconds = 0.0;  // build-benchmark-map + plan
  std::string error;
};

Scenario& DefaultScenario() {
  static Scenario s = [] {
    Scenario out;
    out.dir = fs::temp_directory_path() / "wzmap_acceptance" / "scenario";
    fs::remove_all(out.dir);
    out.config = wzmap::LoadConfig("default");
    try {
      auto t0 = Clock::now();
      for (const char* st : {"gen-workzone", "synth-traj", "fit-gmm", "sample", "build-map"}) {
        wzmap::RunStage(st, out.config, out.dir);
      }
      out.map_seconds = Seconds(t0);
      t0 = Clock::now();
      wzmap::RunStage("build-benchmark-map", out.config, out.dir);
      wzmap::RunStage("plan", out.config, out.dir);
      out.plan_seconds = Seconds(t0);
      wzmap::RunStage("simulate", out.config, out.dir);
      wzmap::RunStage("evaluate", out.config, out.dir);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  }();
  return s;
}

Outcome PrecisionAnalog() {
  Outcome o;
  Scenario& s = DefaultScenario();
  if (!s.error.empty()) return {false, s.error};
  o.Require(s.config.trajectory.use == 5, "expected 5 trajectories in the fit");
  o.Require(s.config.trajectory.synth.lateral_sigma == 0.3, "expected sigma 0.3");
  const auto crowd = ReadPgmPixels(s.dir / wzmap::artifact::kCrowdMap);
  const auto truth = ReadPgmPixels(s.dir / wzmap::artifact::kTruthMap);
  long pf = 0, tp = 0;
  for (std::size_t r = 0; r < crowd.size(); ++r) {
    for (std::size_t c = 0; c < crowd[r].size(); ++c) {
      if (crowd[r][c] == 255) {
        ++pf;
        tp += truth[r][c] == 255;
      }
    }
  }
  const double precision = pf ? static_cast<double>(tp) / pf : 0.0;
  o.Require(precision >= 0.85, Fmt("precision %.4f < 0.85", precision));
  o.Require(s.map_seconds < 30.0, Fmt("map stages took %.1f s", s.map_seconds));
  o.detail = Fmt("precision %.4f", precision) + Fmt(", %.1f s", s.map_seconds) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome RuleViolationReproduction() {
  Outcome o;
  Scenario& s = DefaultScenario();
  if (!s.error.empty()) return {false, s.error};
  const auto layout = nlohmann::json::parse(ReadFile(s.dir / wzmap::artifact::kLayout));
  const auto closed = JsonPoints(layout.at("closed_region"));
  auto violates = [&](const fs::path& file) {
    for (const auto& r : ReadCsv(file)) {
      if (oracle::WindingNumber(closed, {r[1], r[2]}) != 0) return true;
    }
    return false;
  };
  const bool bench = violates(s.dir / wzmap::artifact::kBenchmarkPath);
  const bool crowd = violates(s.dir / wzmap::artifact::kPath);
  o.Require(bench, "benchmark path stays out of the closed region");
  o.Require(!crowd, "crowdsourced path enters the closed region");
  o.Require(s.plan_seconds < 60.0, Fmt("planning took %.1f s", s.plan_seconds));
  const auto report = nlohmann::json::parse(ReadFile(s.dir / wzmap::artifact::kReport));
  o.Require(report.at("benchmark_violates").get<bool>() == bench, "report disagrees (benchmark)");
  o.Require(report.at("crowdsourced_violates").get<bool>() == crowd, "report disagrees (crowd)");
  o.detail = std::string("benchmark=") + (bench ? "violates" : "clean") +
             ", crowd=" + (crowd ? "violates" : "clean") + Fmt(", %.1f s", s.plan_seconds) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome ClearanceAnalog() {
  Outcome o;
  Scenario& s = DefaultScenario();
  if (!s.error.empty()) return {false, s.error};
  const auto layout = nlohmann::json::parse(ReadFile(s.dir / wzmap::artifact::kLayout));
  const auto cone_line = JsonPoints(layout.at("cone_line"));
  const auto act = layout.at("activity_area");
  const double x0 = act.at("min").at(0).get<double>();
  const double x1 = act.at("max").at(0).get<double>();
  const double half = s.config.sim.vehicle.width / 2.0;
  double min_d = INFINITY, lo = INFINITY, hi = -INFINITY;
  const auto trace = ReadCsv(s.dir / wzmap::artifact::kTrace);
  for (const auto& r : trace) {
    const Eigen::Vector2d p(r[1], r[2]);
    const Eigen::Vector2d n(-std::sin(r[3]), std::cos(r[3]));
    const double d = std::min(PolyDist(cone_line, p + half * n), PolyDist(cone_line, p - half * n));
    min_d = std::min(min_d, d);
    if (p.x() >= x0 && p.x() <= x1) {
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  const double fluct = hi >= lo ? hi - lo : 0.0;
  o.Require(!trace.empty(), "empty trace");
  o.Require(hi >= lo, "trace never enters the activity span");
  o.Require(min_d >= 0.7, Fmt("min cone clearance %.3f m < 0.7 m", min_d));
  o.Require(fluct <= 0.5, Fmt("fluctuation %.3f m > 0.5 m", fluct));
  o.detail = Fmt("min clearance %.3f m", min_d) + Fmt(", fluctuation %.3f m", fluct) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

wzmap::Points2<double> Blob(std::mt19937_64& rng, int n, double cx, double cy, double sigma) {
  std::normal_distribution<double> z(0.0, 1.0);
  wzmap::Points2<double> out(n, 2);
  for (int i = 0; i < n; ++i) out.row(i) << cx + sigma * z(rng), cy + sigma * z(rng);
  return out;
}

Outcome EmProperties() {
  Outcome o;
  // (a) monotone traces on 50 random datasets.
  int bad = 0;
  for (int d = 0; d < 50; ++d) {
    std::mt19937_64 rng(500 + d);
    std::uniform_real_distribution<double> c(-8.0, 8.0);
    wzmap::Points2<double> x(240, 2);
    for (int j = 0; j < 3; ++j) x.middleRows(80 * j, 80) = Blob(rng, 80, c(rng), c(rng), 0.4 + 0.4 * j);
    const auto fit = wzmap::EmFit(x, 2 + d % 4, {1e-10, 300, static_cast<std::uint64_t>(d)});
    const auto& t = fit.report.log_likelihood_trace;
    for (std::size_t i = 1; i < t.size(); ++i) bad += t[i] < t[i - 1] - 1e-9;
  }
  o.Require(bad == 0, std::to_string(bad) + " decreasing EM steps");

  // (b) k = 1 closed form.
  std::mt19937_64 rng(77);
  wzmap::Points2<double> x = Blob(rng, 400, 3.0, -1.0, 1.2);
  x.col(0) += 0.3 * x.col(1);
  const auto one = wzmap::EmFit(x, 1, {1e-6, 500, 1});
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int i = 0; i < x.rows(); ++i) mean += x.row(i).transpose();
  mean /= x.rows();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (int i = 0; i < x.rows(); ++i) {
    const Eigen::Vector2d dd = x.row(i).transpose() - mean;
    cov += dd * dd.transpose();
  }
  cov = cov / x.rows() + 1e-6 * Eigen::Matrix2d::Identity();
  const auto& c1 = one.mixture.components[0];
  o.Require((c1.mean - mean).cwiseAbs().maxCoeff() <= 1e-8, "k=1 mean differs");
  o.Require((c1.cov - cov).cwiseAbs().maxCoeff() <= 1e-8, "k=1 covariance differs");

  // (c) two clusters.
  wzmap::Points2<double> two(1000, 2);
  two << Blob(rng, 500, 0, 0, 0.5), Blob(rng, 500, 10, 10, 0.5);
  const auto fit2 = wzmap::EmFit(two, 2, {1e-8, 500, 3});
  Eigen::Vector2d a = fit2.mixture.components[0].mean;
  Eigen::Vector2d b = fit2.mixture.components[1].mean;
  if (a.x() > b.x()) std::swap(a, b);
  const double err = std::max(a.norm(), (b - Eigen::Vector2d(10, 10)).norm());
  o.Require(err <= 0.2, Fmt("two-cluster mean error %.3f m", err));

  // (d) translation equivariance.
  const Eigen::RowVector2d v(250.5, -80.25);
  const wzmap::Points2<double> shifted = two.rowwise() + v;
  const auto fit3 = wzmap::EmFit(shifted, 2, {1e-8, 500, 3});
  double shift_err = 0.0;
  for (int k = 0; k < 2; ++k) {
    shift_err = std::max(shift_err, (fit3.mixture.components[k].mean -
                                     fit2.mixture.components[k].mean - v.transpose())
                                        .cwiseAbs()
                                        .maxCoeff());
  }
  o.Require(shift_err <= 1e-8, Fmt("translated means off by %.3g", shift_err));
  o.detail = Fmt("two-cluster error %.3f m", err) + Fmt(", translation error %.2g", shift_err) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome SamplingGate() {
  Outcome o;
  const double gate = oracle::ChiSquare2QuantileBisect(0.95);
  std::mt19937_64 rng(9);
  wzmap::Mixture m;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    wzmap::Component c;
    c.weight = 0.25;
    c.mean = Eigen::Vector2d(3.0 * k, u(rng));
    Eigen::Matrix2d a;
    a << u(rng), u(rng), u(rng), u(rng);
    c.cov = a * a.transpose() + 0.1 * Eigen::Matrix2d::Identity();
    m.components.push_back(c);
  }
  wzmap::SamplingStats stats;
  const auto s = wzmap::SampleGated(m, 100000, 0.95, 11, &stats);
  long outside = 0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double best = INFINITY;
    for (const auto& c : m.components) {
      best = std::min(best, oracle::MahalanobisCofactor(c.cov, c.mean, s.row(i).transpose()));
    }
    outside += best > gate + 1e-9;
  }
  const double rate = static_cast<double>(stats.accepted) / stats.draws;
  o.Require(outside == 0, std::to_string(outside) + " samples outside the gate");
  o.Require(std::abs(rate - 0.95) <= 0.02, Fmt("acceptance %.4f", rate));
  o.Require(std::abs(wzmap::ChiSquare2Quantile(0.95) - gate) < 1e-9, "quantile mismatch");
  o.detail = Fmt("gate %.4f", gate) + Fmt(", acceptance %.4f", rate) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

oracle::Raster ToRaster(const wzmap::OccupancyGrid& g) {
  oracle::Raster out(g.height(), std::vector<int>(g.width()));
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) out[r][c] = g.occupied(c, r);
  }
  return out;
}

Outcome GridOracles() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int cases = 120;
  int raster_bad = 0, inflate_bad = 0, precision_bad = 0;
  for (int t = 0; t < cases; ++t) {
    const double res = 0.05 + 0.25 * unit(rng);
    const Eigen::Vector2d origin(10 * unit(rng) - 5, 10 * unit(rng) - 5);
    const wzmap::Box bounds(origin, origin + Eigen::Vector2d(32 * res, 32 * res));
    const int n = static_cast<int>(30 * unit(rng));
    Eigen::MatrixX2d s(n, 2);
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) {
      s.row(i) << origin.x() + (34 * unit(rng) - 1) * res, origin.y() + (34 * unit(rng) - 1) * res;
      pts.push_back(s.row(i).transpose());
    }
    const double side = 0.6 * unit(rng);
    const auto grid = wzmap::FromSamples(s, side, bounds, res);
    const auto raster = oracle::FootprintRaster({origin.x(), origin.y(), res, 32, 32}, pts, side);
    raster_bad += grid.width() != 32 || grid.height() != 32 || ToRaster(grid) != raster;

    const double radius = 1.0 * unit(rng);
    inflate_bad += ToRaster(wzmap::Inflate(grid, radius)) != oracle::Dilate(raster, res, radius);

    oracle::Raster truth(32, std::vector<int>(32));
    for (auto& row : truth) {
      for (auto& v : row) v = unit(rng) < 0.4;
    }
    wzmap::OccupancyGrid truth_grid(origin, res, 32, 32);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) truth_grid.set(c, r, truth[r][c]);
    }
    if (grid.CountFree() > 0) {
      precision_bad += wzmap::Precision(grid, truth_grid) != oracle::Precision(raster, truth);
    }
  }
  o.Require(raster_bad == 0, std::to_string(raster_bad) + " footprint mismatches");
  o.Require(inflate_bad == 0, std::to_string(inflate_bad) + " inflation mismatches");
  o.Require(precision_bad == 0, std::to_string(precision_bad) + " precision mismatches");
  o.detail = std::to_string(cases) + " random 32x32 cases" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome PlannerProperties() {
  Outcome o;
  Scenario& s = DefaultScenario();
  if (!s.error.empty()) return {false, s.error};
  const double r_min = s.config.planner.params.r_min;
  // Returned scenario paths against the maps they were planned on.
  for (const auto& [path_file, map_file] :
       {std::pair{wzmap::artifact::kPath, wzmap::artifact::kCrowdMap},
        std::pair{wzmap::artifact::kBenchmarkPath, wzmap::artifact::kBenchmarkMap}}) {
    const auto grid = wzmap::Inflate(wzmap::LoadPgm(s.dir / map_file), s.config.grid.inflation_radius);
    const auto rows = ReadCsv(s.dir / path_file);
    int hits = 0;
    double kmax = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      hits += !grid.IsFreeAt({rows[i][1], rows[i][2]});
      if (i >= 2) {
        const double r = oracle::CircumRadius({rows[i - 2][1], rows[i - 2][2]},
                                              {rows[i - 1][1], rows[i - 1][2]},
                                              {rows[i][1], rows[i][2]});
        if (std::isfinite(r)) kmax = std::max(kmax, 1.0 / r);
      }
    }
    o.Require(!rows.empty(), std::string(path_file) + " empty");
    o.Require(hits == 0, std::string(path_file) + ": " + std::to_string(hits) + " poses in occupied cells");
    o.Require(kmax <= 1.05 / r_min, std::string(path_file) + Fmt(": curvature %.4f", kmax));
  }

  // Heuristic against Bellman-Ford on random 20x20 grids.
  std::mt19937_64 rng(8080);
  std::bernoulli_distribution occ(0.3);
  int h_bad = 0;
  for (int t = 0; t < 50; ++t) {
    oracle::Raster r(20, std::vector<int>(20));
    wzmap::OccupancyGrid g({0, 0}, 1.0, 20, 20);
    for (int row = 0; row < 20; ++row) {
      for (int col = 0; col < 20; ++col) {
        r[row][col] = occ(rng);
        g.set(col, row, r[row][col]);
      }
    }
    r[3][4] = 0;
    g.set(4, 3, 0);
    const auto h = wzmap::HolonomicHeuristic(g, g.CellCenter(4, 3));
    const auto d = oracle::GridDistances(r, 1.0, 4, 3);
    for (int row = 0; row < 20; ++row) {
      for (int col = 0; col < 20; ++col) {
        if (r[row][col]) continue;
        const bool inf_h = std::isinf(h(row, col));
        const bool inf_d = std::isinf(d[row][col]);
        h_bad += inf_h != inf_d || (!inf_d && h(row, col) > d[row][col] + 1e-9);
      }
    }
  }
  o.Require(h_bad == 0, std::to_string(h_bad) + " inadmissible heuristic cells");

  // Sealed grids.
  int sealed_ok = 0;
  for (int t = 0; t < 5; ++t) {
    wzmap::OccupancyGrid g({0, 0}, 0.1, 200, 80, wzmap::OccupancyGrid::kFree);
    for (int r = 0; r < 80; ++r) g.set(60 + 20 * t, r, wzmap::OccupancyGrid::kOccupied);
    try {
      wzmap::HybridAStar(g, {1.0, 4.0, 0.0}, {19.0, 4.0, 0.0}, wzmap::PlannerParams{});
    } catch (const wzmap::Error& e) {
      sealed_ok += e.code() == wzmap::ErrorCode::kNoPath;
    }
  }
  o.Require(sealed_ok == 5, "sealed grids: " + std::to_string(sealed_ok) + "/5 reported no-path");
  o.detail = "scenario paths, 50 heuristic grids, 5 sealed grids" +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome ControllerChecks() {
  Outcome o;
  const wzmap::VehicleParams p;
  const double L = p.wheelbase;
  o.Require(std::abs(wzmap::PurePursuitLaw(0.0, 3.0, L)) <= 1e-12, "alpha=0");
  o.Require(std::abs(wzmap::PurePursuitLaw(M_PI / 2, 2 * L, L) - M_PI / 4) <= 1e-12, "alpha=pi/2");

  wzmap::PidSpeedController pid(p.kp, p.ki, p.kd);
  double u = 0.0;
  for (int i = 0; i < 10; ++i) u = pid.Update(1.0, 0.0, 0.05);
  o.Require(std::abs(u - 0.509) <= 1e-12, Fmt("PID %.15f", u));

  // Turning radius from three trace points.
  wzmap::VehicleParams fine = p;
  fine.dt = 0.01;
  wzmap::VehicleState st{0, 0, 0, 5.0};
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 3000; ++i) {
    pts.emplace_back(st.x, st.y);
    st = wzmap::BicycleStep(st, {0, 0, 0.25}, fine);
  }
  const double r = oracle::CircumRadius(pts[0], pts[1000], pts[2000]);
  const double r_expect = L / std::tan(0.25);
  o.Require(std::abs(r - r_expect) <= 0.01 * r_expect, Fmt("turning radius %.3f", r));

  wzmap::ReferencePath line;
  for (int i = 0; i <= 600; ++i) line.poses.push_back({0.5 * i, 0.0, 0.0});
  const auto trace = wzmap::Simulate(line, {0.0, 0.5, 0.0, 0.0}, p, 25.0);
  double late = 0.0;
  for (const auto& e : trace.entries) {
    if (e.t >= 10.0) late = std::max(late, std::abs(e.state.y));
  }
  const double v_end = trace.entries.back().state.speed;
  o.Require(late < 0.1, Fmt("lateral error after 10 s %.3f m", late));
  o.Require(std::abs(v_end - 10.0) <= 0.2, Fmt("speed %.3f", v_end));
  o.detail = Fmt("radius %.3f m", r) + Fmt(" vs %.3f m", r_expect) +
             Fmt(", lateral %.4f m", late) + Fmt(", speed %.3f m/s", v_end) +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome Determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "wzmap_acceptance";
  const fs::path a = root / "run_a";
  const fs::path b = root / "run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const int ca = RunCli("run-all --quiet --config default --seed 7 --out " + a.string());
  const int cb = RunCli("run-all --quiet --config default --seed 7 --out " + b.string());
  o.Require(ca == 0 && cb == 0, "run-all exit codes " + std::to_string(ca) + "," + std::to_string(cb));
  const std::string ra = ReadFile(a / wzmap::artifact::kReport);
  const std::string rb = ReadFile(b / wzmap::artifact::kReport);
  o.Require(!ra.empty() && ra == rb, "report.json differs between runs");
  o.detail = std::to_string(ra.size()) + " byte report, identical=" + (ra == rb ? "yes" : "no") +
             (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

Outcome TaperGeometry() {
  Outcome o;
  const wzmap::WorkZoneLayout l = wzmap::BuildLayout(wzmap::WorkZoneSpec{});
  o.Require(l.merging_taper == 720 * 0.3048, "merging taper");
  o.Require(l.shifting_taper == 360 * 0.3048, "shifting taper");
  o.Require(l.shoulder_taper == 240 * 0.3048, "shoulder taper");
  o.detail = Fmt("%.3f", l.merging_taper) + Fmt("/%.3f", l.shifting_taper) +
             Fmt("/%.3f m", l.shoulder_taper) + (o.detail.empty() ? "" : " | " + o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"precision analog", PrecisionAnalog},
      {"rule-violation reproduction", RuleViolationReproduction},
      {"clearance analog", ClearanceAnalog},
      {"EM property suite", EmProperties},
      {"sampling gate", SamplingGate},
      {"grid oracles", GridOracles},
      {"planner properties", PlannerProperties},
      {"controller checks", ControllerChecks},
      {"determinism", Determinism},
      {"MUTCD geometry", TaperGeometry},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s criterion %zu (%s): %s\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
