#include "wzmap/vehicle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "wzmap/error.hpp"

namespace wzmap {

namespace {

// Arc length searched ahead of the current nearest pose.
constexpr double kNearestWindow = 10.0;
constexpr double kArrivalRadius = 1.0;

}  // namespace

void VehicleParams::Validate() const {
  if (!(wheelbase > 0.0) || !(dt > 0.0) || !(l_dmin > 0.0) || !(max_steer > 0.0) ||
      !(width >= 0.0) || !(a_max >= 0.0) || !(b_max >= 0.0)) {
    throw Error(ErrorCode::kInvalidSpec,
                "vehicle needs wheelbase, dt, l_dmin, max_steer > 0");
  }
}

double PidSpeedController::Update(double v_ref, double v, double dt) {
  const double e = v_ref - v;
  const double derivative = window_.empty() ? 0.0 : (e - window_.back()) / dt;
  window_.push_back(e);
  if (window_.size() > kWindow) window_.pop_front();
  double sum = 0.0;
  for (double x : window_) sum += x;
  last_integral_term_ = ki_ * sum * dt;
  return kp_ * e + last_integral_term_ + kd_ * derivative;
}

ControlCommand LongitudinalCommand(double u) {
  ControlCommand cmd;
  if (u > 0.0) cmd.throttle = std::min(u, 1.0);
  if (u < 0.0) cmd.brake = std::min(-u, 1.0);
  return cmd;
}

double PurePursuitLaw(double alpha, double lookahead, double wheelbase) {
  if (lookahead <= 0.0) return 0.0;
  return std::atan(2.0 * wheelbase * std::sin(alpha) / lookahead);
}

PurePursuit::PurePursuit(const ReferencePath& path, double l_dmin, double wheelbase,
                         double max_steer)
    : path_(path), l_dmin_(l_dmin), wheelbase_(wheelbase), max_steer_(max_steer) {
  arc_.assign(path.poses.size(), 0.0);
  for (std::size_t i = 1; i < path.poses.size(); ++i) {
    arc_[i] = arc_[i - 1] + (path.poses[i].position() - path.poses[i - 1].position()).norm();
  }
}

double PurePursuit::Steer(const VehicleState& state) {
  const auto& poses = path_.poses;
  if (poses.empty()) throw Error(ErrorCode::kEmptyPath, "pure pursuit needs a path");
  const Eigen::Vector2d p(state.x, state.y);

  const std::size_t from = nearest_;
  double best = (poses[from].position() - p).squaredNorm();
  for (std::size_t i = from + 1;
       i < poses.size() && arc_[i] - arc_[from] <= kNearestWindow; ++i) {
    const double d = (poses[i].position() - p).squaredNorm();
    if (d < best) {
      best = d;
      nearest_ = i;
    }
  }

  target_ = poses.size() - 1;
  for (std::size_t i = nearest_; i < poses.size(); ++i) {
    if (arc_[i] - arc_[nearest_] >= l_dmin_) {
      target_ = i;
      break;
    }
  }
  const Eigen::Vector2d d = poses[target_].position() - p;
  const double alpha = NormalizeAngle(std::atan2(d.y(), d.x()) - state.heading);
  const double delta = PurePursuitLaw(alpha, d.norm(), wheelbase_);
  return std::clamp(delta, -max_steer_, max_steer_);
}

double PurePursuitSteer(const VehicleState& state, const ReferencePath& path, double l_dmin,
                        double wheelbase, double max_steer) {
  if (path.poses.empty()) throw Error(ErrorCode::kEmptyPath, "pure pursuit needs a path");
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  const Eigen::Vector2d p(state.x, state.y);
  for (std::size_t i = 0; i < path.poses.size(); ++i) {
    const double d = (path.poses[i].position() - p).squaredNorm();
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  std::size_t target = path.poses.size() - 1;
  double s = 0.0;
  for (std::size_t i = nearest + 1; i < path.poses.size(); ++i) {
    s += (path.poses[i].position() - path.poses[i - 1].position()).norm();
    if (s >= l_dmin) {
      target = i;
      break;
    }
  }
  const Eigen::Vector2d d = path.poses[target].position() - p;
  const double alpha = NormalizeAngle(std::atan2(d.y(), d.x()) - state.heading);
  return std::clamp(PurePursuitLaw(alpha, d.norm(), wheelbase), -max_steer, max_steer);
}

VehicleState BicycleStep(const VehicleState& s, const ControlCommand& cmd,
                         const VehicleParams& params) {
  const double accel = cmd.throttle * params.a_max - cmd.brake * params.b_max;
  VehicleState next;
  next.x = s.x + s.speed * std::cos(s.heading) * params.dt;
  next.y = s.y + s.speed * std::sin(s.heading) * params.dt;
  next.heading = NormalizeAngle(
      s.heading + s.speed / params.wheelbase * std::tan(cmd.steer) * params.dt);
  next.speed = std::max(0.0, s.speed + accel * params.dt);
  return next;
}

Trace Simulate(const ReferencePath& path, const VehicleState& start,
               const VehicleParams& params, double horizon) {
  params.Validate();
  if (path.poses.empty()) throw Error(ErrorCode::kEmptyPath, "cannot track an empty path");
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidSpec, "horizon must be > 0");

  PidSpeedController pid(params.kp, params.ki, params.kd);
  PurePursuit tracker(path, params.l_dmin, params.wheelbase, params.max_steer);
  const Eigen::Vector2d goal = path.poses.back().position();
  const long steps = static_cast<long>(std::floor(horizon / params.dt + 1e-9));

  Trace trace;
  VehicleState state = start;
  for (long k = 0;; ++k) {
    ControlCommand cmd = LongitudinalCommand(pid.Update(params.v_ref, state.speed, params.dt));
    cmd.steer = tracker.Steer(state);
    trace.entries.push_back({k * params.dt, state, cmd});
    if ((Eigen::Vector2d(state.x, state.y) - goal).norm() < kArrivalRadius) {
      trace.completed = true;
      break;
    }
    if (k >= steps) break;
    state = BicycleStep(state, cmd, params);
  }
  return trace;
}

void SaveTraceCsv(const Trace& trace, const std::filesystem::path& file) {
  std::FILE* f = std::fopen(file.c_str(), "w");
  if (f == nullptr) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  std::fputs("t,x,y,heading,speed,throttle,brake,steer\n", f);
  for (const auto& e : trace.entries) {
    std::fprintf(f, "%.4f,%.9f,%.9f,%.12f,%.9f,%.9f,%.9f,%.12f\n", e.t, e.state.x, e.state.y,
                 e.state.heading, e.state.speed, e.command.throttle, e.command.brake,
                 e.command.steer);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorCode::kIoError, "failed writing " + file.string());
}

Trace LoadTraceCsv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  Trace trace;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "t,x,y,heading,speed,throttle,brake,steer") {
        throw Error(ErrorCode::kParseError, file.string() + ":1: unexpected header");
      }
      continue;
    }
    TraceEntry e;
    char tail = 0;
    const int n = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf%c", &e.t,
                              &e.state.x, &e.state.y, &e.state.heading, &e.state.speed,
                              &e.command.throttle, &e.command.brake, &e.command.steer, &tail);
    if (n != 8) {
      throw Error(ErrorCode::kParseError,
                  file.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    trace.entries.push_back(e);
  }
  return trace;
}

}  // namespace wzmap
