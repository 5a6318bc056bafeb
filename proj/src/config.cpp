#include "wzmap/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "wzmap/error.hpp"

namespace wzmap {

namespace {

[[noreturn]] void Fail(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::kConfigParse, std::string(source) + ": " + what);
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

Setter Real(double& out) {
  return [&out](const toml::node& n, const std::string& key) {
    if (auto v = n.as_floating_point()) {
      out = v->get();
    } else if (auto i = n.as_integer()) {
      out = static_cast<double>(i->get());
    } else {
      throw std::invalid_argument(key + " must be a number");
    }
  };
}

template <typename Int>
Setter Integer(Int& out) {
  return [&out](const toml::node& n, const std::string& key) {
    auto i = n.as_integer();
    if (!i) throw std::invalid_argument(key + " must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (i->get() < 0) throw std::invalid_argument(key + " must be >= 0");
    }
    out = static_cast<Int>(i->get());
  };
}

Setter Text(std::string& out) {
  return [&out](const toml::node& n, const std::string& key) {
    auto s = n.as_string();
    if (!s) throw std::invalid_argument(key + " must be a string");
    out = s->get();
  };
}

// Degrees in the file, radians in memory.
Setter Degrees(double& out_rad) {
  return [&out_rad](const toml::node& n, const std::string& key) {
    double deg = 0.0;
    Real(deg)(n, key);
    out_rad = DegToRad(deg);
  };
}

using Section = std::map<std::string, Setter>;

std::map<std::string, Section> Schema(PipelineConfig& c) {
  std::map<std::string, Section> s;
  WorkZoneSpec& wz = c.workzone;
  s["workzone"] = {{"speed_limit_mph", Real(wz.speed_limit_mph)},
                   {"lane_width_ft", Real(wz.lane_width_ft)},
                   {"n_lanes", Integer(wz.n_lanes)},
                   {"shoulder_width_ft", Real(wz.shoulder_width_ft)},
                   {"closed_lane_index", Integer(wz.closed_lane_index)},
                   {"cone_spacing_ft", Real(wz.cone_spacing_ft)},
                   {"activity_length_ft", Real(wz.activity_length_ft)},
                   {"activity_width_ft", Real(wz.activity_width_ft)},
                   {"approach_length_ft", Real(wz.approach_length_ft)},
                   {"cone_offset_ft", Real(wz.cone_offset_ft)}};
  SynthesisParams& tr = c.trajectory.synth;
  s["trajectory"] = {{"synthesize", Integer(tr.n)},
                     {"use", Integer(c.trajectory.use)},
                     {"lateral_sigma", Real(tr.lateral_sigma)},
                     {"step", Real(tr.step)},
                     {"speed", Real(tr.speed)},
                     {"merge_lead_m", Real(tr.merge_lead)},
                     {"seed", Integer(tr.seed)}};
  GmmConfig& g = c.gmm;
  s["gmm"] = {{"k_min", Integer(g.k_min)},
              {"k_max", Integer(g.k_max)},
              {"tol", Real(g.em.tol)},
              {"max_iter", Integer(g.em.max_iter)},
              {"seed", Integer(g.em.seed)},
              {"confidence", Real(g.confidence)},
              {"n_samples", Integer(g.n_samples)},
              {"sample_seed", Integer(g.sample_seed)}};
  GridConfig& gr = c.grid;
  s["grid"] = {{"resolution", Real(gr.resolution)},
               {"footprint_side", Real(gr.footprint_side)},
               {"inflation_radius", Real(gr.inflation_radius)},
               {"cone_radius", Real(gr.cone_radius)},
               {"margin", Real(gr.margin)}};
  PlannerParams& p = c.planner.params;
  s["planner"] = {{"r_min", Real(p.r_min)},
                  {"heading_bins", Integer(p.heading_bins)},
                  {"turn_penalty", Real(p.turn_penalty)},
                  {"steer_change_penalty", Real(p.steer_change_penalty)},
                  {"goal_tolerance", Real(p.goal_tolerance)},
                  {"goal_heading_tolerance_deg", Real(p.goal_heading_tolerance)},
                  {"max_expansions", Integer(p.max_expansions)},
                  {"collision_samples", Integer(p.collision_samples)},
                  {"start_offset", Real(c.planner.start_offset)},
                  {"goal_offset", Real(c.planner.goal_offset)}};
  VehicleParams& v = c.sim.vehicle;
  s["vehicle"] = {{"wheelbase", Real(v.wheelbase)},
                  {"width", Real(v.width)},
                  {"max_steer_deg", Degrees(v.max_steer)},
                  {"l_dmin", Real(v.l_dmin)},
                  {"kp", Real(v.kp)},
                  {"ki", Real(v.ki)},
                  {"kd", Real(v.kd)},
                  {"v_ref", Real(v.v_ref)},
                  {"dt", Real(v.dt)},
                  {"a_max", Real(v.a_max)},
                  {"b_max", Real(v.b_max)},
                  {"path_step", Real(c.sim.path_step)},
                  {"horizon", Real(c.sim.horizon)}};
  s["evaluation"] = {{"fluctuation_bound", Real(c.evaluation.fluctuation_bound)}};
  s["output"] = {{"dir", Text(c.output_dir)}};
  return s;
}

}  // namespace

void PipelineConfig::Validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kConfigParse, "invalid config: " + what);
  };
  try {
    workzone.Validate();
    sim.vehicle.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigParse, std::string("invalid config: ") + e.what());
  }
  check(trajectory.synth.n >= 0, "trajectory.synthesize must be >= 0");
  check(trajectory.use >= 1 && trajectory.use <= trajectory.synth.n,
        "trajectory.use must be in [1, synthesize]");
  check(trajectory.synth.step > 0 && trajectory.synth.lateral_sigma >= 0 &&
            trajectory.synth.speed > 0,
        "trajectory step/speed must be > 0 and lateral_sigma >= 0");
  check(gmm.k_min >= 1 && gmm.k_max >= gmm.k_min, "need 1 <= gmm.k_min <= gmm.k_max");
  check(gmm.em.tol > 0 && gmm.em.max_iter >= 1, "gmm.tol > 0 and gmm.max_iter >= 1");
  check(gmm.confidence > 0 && gmm.confidence < 1, "gmm.confidence must be in (0, 1)");
  check(gmm.n_samples >= 0, "gmm.n_samples must be >= 0");
  check(grid.resolution > 0 && grid.footprint_side >= 0 && grid.inflation_radius >= 0 &&
            grid.cone_radius >= 0 && grid.margin >= 0,
        "grid values must be non-negative and resolution > 0");
  check(planner.params.r_min > 0 && planner.params.heading_bins >= 1 &&
            planner.params.goal_tolerance > 0 && planner.params.max_expansions > 0 &&
            planner.params.collision_samples >= 1,
        "planner values out of range");
  check(sim.path_step > 0 && sim.horizon > 0, "vehicle.path_step and horizon must be > 0");
  check(evaluation.fluctuation_bound >= 0, "evaluation.fluctuation_bound must be >= 0");
  check(!output_dir.empty(), "output.dir must not be empty");
}

PipelineConfig ParseConfig(std::string_view toml_text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    Fail(source, msg.str());
  }

  PipelineConfig config;
  config.evaluation.vehicle_width = config.sim.vehicle.width;
  auto schema = Schema(config);
  for (const auto& [name, node] : root) {
    const std::string section(name.str());
    const auto it = schema.find(section);
    if (it == schema.end()) Fail(source, "unknown section [" + section + "]");
    const toml::table* table = node.as_table();
    if (table == nullptr) Fail(source, section + " must be a table");
    for (const auto& [key_name, value] : *table) {
      const std::string key(key_name.str());
      const auto setter = it->second.find(key);
      if (setter == it->second.end()) Fail(source, "unknown key " + section + "." + key);
      try {
        setter->second(value, section + "." + key);
      } catch (const std::invalid_argument& e) {
        Fail(source, e.what());
      }
    }
  }
  config.evaluation.vehicle_width = config.sim.vehicle.width;
  config.Validate();
  return config;
}

PipelineConfig LoadConfig(const std::string& path_or_default) {
  if (path_or_default == "default") {
    PipelineConfig config;
    config.Validate();
    return config;
  }
  std::ifstream in(path_or_default);
  if (!in) {
    throw Error(ErrorCode::kConfigParse, "cannot read config file " + path_or_default);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path_or_default);
}

void ApplySeed(PipelineConfig& config, std::uint64_t seed) {
  config.trajectory.synth.seed = seed;
  config.gmm.em.seed = seed;
  config.gmm.sample_seed = seed;
}

}  // namespace wzmap
