#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <vector>

#include "wzmap/planner.hpp"

namespace wzmap {

// Rear-axle reference point.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

struct ControlCommand {
  double throttle = 0.0;  // [0, 1]
  double brake = 0.0;     // [0, 1]
  double steer = 0.0;     // rad
};

struct VehicleParams {
  double wheelbase = 4.6391;
  double width = 1.85;
  double max_steer = DegToRad(30.0);
  double l_dmin = 3.0;
  double kp = 0.5;
  double ki = 0.018;
  double kd = 0.4;
  double v_ref = 10.0;
  double dt = 0.05;
  double a_max = 2.0;  // m/s^2 at full throttle
  double b_max = 2.0;  // m/s^2 at full brake

  void Validate() const;
};

// PID on speed error with the integral taken over the ten most recent errors,
// the current one included. The derivative is zero on the first call.
class PidSpeedController {
 public:
  static constexpr std::size_t kWindow = 10;

  PidSpeedController(double kp, double ki, double kd) : kp_(kp), ki_(ki), kd_(kd) {}

  // Signed command: positive is throttle, negative is brake.
  double Update(double v_ref, double v, double dt);

  double last_integral_term() const { return last_integral_term_; }
  const std::deque<double>& window() const { return window_; }

 private:
  double kp_, ki_, kd_;
  std::deque<double> window_;
  double last_integral_term_ = 0.0;
};

// Splits a signed longitudinal command into exclusive throttle / brake.
ControlCommand LongitudinalCommand(double u);

// delta = atan(2 L sin(alpha) / l_d); zero when l_d is zero.
double PurePursuitLaw(double alpha, double lookahead, double wheelbase);

// Tracks a path with a nearest-pose index that only moves forward.
class PurePursuit {
 public:
  PurePursuit(const ReferencePath& path, double l_dmin, double wheelbase,
              double max_steer);

  // Throws Error(kEmptyPath).
  double Steer(const VehicleState& state);

  std::size_t nearest_index() const { return nearest_; }
  std::size_t target_index() const { return target_; }

 private:
  const ReferencePath& path_;
  std::vector<double> arc_;
  double l_dmin_;
  double wheelbase_;
  double max_steer_;
  std::size_t nearest_ = 0;
  std::size_t target_ = 0;
};

// Single-shot version that searches the whole path for the nearest pose.
double PurePursuitSteer(const VehicleState& state, const ReferencePath& path, double l_dmin,
                        double wheelbase, double max_steer);

// Explicit Euler step of the kinematic bicycle model.
VehicleState BicycleStep(const VehicleState& state, const ControlCommand& cmd,
                         const VehicleParams& params);

struct TraceEntry {
  double t = 0.0;
  VehicleState state;
  ControlCommand command;
};

struct Trace {
  std::vector<TraceEntry> entries;
  bool completed = false;  // came within 1 m of the path end
};

Trace Simulate(const ReferencePath& path, const VehicleState& start,
               const VehicleParams& params, double horizon);

// CSV `t,x,y,heading,speed,throttle,brake,steer`.
void SaveTraceCsv(const Trace& trace, const std::filesystem::path& file);
Trace LoadTraceCsv(const std::filesystem::path& file);

}  // namespace wzmap
