#include "pickbench/config.hpp"

#include <fstream>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

#include "pickbench/error.hpp"

namespace pickbench {

using nlohmann::json;

void ProtocolParams::validate() const {
  for (double v : {init_move_duration, approach_duration, lift_duration, transfer_duration,
                   descent_speed, approach_height, max_descent, dt, punnet_clearance}) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "protocol durations and speeds must be > 0");
  }
  for (double v : {init_overhead, approach_overhead, transport_overhead}) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "protocol overheads must be >= 0");
  }
  if (max_descent < approach_height) {
    throw Error(ErrorCode::InvalidArgument, "max_descent must reach the pick target");
  }
  if (transport_samples < 1) throw Error(ErrorCode::InvalidArgument, "transport_samples must be >= 1");
}

void RunConfig::validate() const {
  try {
    gripper.validate();
    impedance.validate();
    thresholds.validate();
    sensor.validate();
    scene.validate();
    protocol.validate();
    matrix.validate();
    if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

namespace {

// Reads the known keys of one JSON object and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      fail(std::string("key '") + key + "': " + e.what());
    }
  }

  void deg(const char* key, double& out_rad) {
    double v = rad2deg(out_rad);
    get(key, v);
    out_rad = deg2rad(v);
  }

  void vec3(const char* key, Vec3& out) {
    std::array<double, 3> v{out.x(), out.y(), out.z()};
    get(key, v);
    out = Vec3(v[0], v[1], v[2]);
  }

  template <class Fn>
  void child(const char* key, Fn&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Section s(j_.at(key), path_ + "." + key);
    fn(s);
    s.finish();
  }

  template <class E, class Parse>
  void enum_list(const char* key, std::vector<E>& out, Parse parse) {
    std::vector<std::string> names;
    seen_.insert(key);
    if (!j_.contains(key)) return;
    get(key, names);
    out.clear();
    try {
      for (const auto& n : names) out.push_back(parse(n));
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail("unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigError, path_ + ": " + msg);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_linkage(Section& s, FingerLinkage& l) {
  s.get("crank_length", l.crank_length);
  s.get("coupler_length", l.coupler_length);
  s.get("rocker_length", l.rocker_length);
  s.get("ground_length", l.ground_length);
  s.get("tip_offset", l.tip_offset);
  s.get("finger_width", l.finger_width);
}

json linkage_json(const FingerLinkage& l) {
  return {{"crank_length", l.crank_length},     {"coupler_length", l.coupler_length},
          {"rocker_length", l.rocker_length},   {"ground_length", l.ground_length},
          {"tip_offset", l.tip_offset},         {"finger_width", l.finger_width}};
}

std::array<double, 4> to_deg(const std::array<double, 4>& rad) {
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = rad2deg(rad[i]);
  return out;
}

void read_deg4(Section& s, const char* key, std::array<double, 4>& rad) {
  auto deg = to_deg(rad);
  s.get(key, deg);
  for (int i = 0; i < 4; ++i) rad[i] = deg2rad(deg[i]);
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <class E>
json enum_names(const std::vector<E>& v) {
  json out = json::array();
  for (auto e : v) out.push_back(std::string(to_string(e)));
  return out;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Section root(j, "config");
  root.get("master_seed", c.master_seed);
  root.get("jobs", c.jobs);
  root.get("output_dir", c.output_dir);

  root.child("gripper", [&](Section& s) {
    s.child("linkage", [&](Section& l) {
      FingerLinkage linkage = c.gripper.linkages[0];
      read_linkage(l, linkage);
      c.gripper.linkages.fill(linkage);
    });
    s.deg("flexion_min_deg", c.gripper.flexion_min);
    s.deg("flexion_max_deg", c.gripper.flexion_max);
    s.deg("flexion_open_deg", c.gripper.flexion_open);
    s.get("pair_gap", c.gripper.pair_gap);
    read_deg4(s, "parallel_azimuths_deg", c.gripper.parallel_azimuths);
    read_deg4(s, "concentric_azimuths_deg", c.gripper.concentric_azimuths);
    s.get("tip_threshold", c.gripper.tip_threshold);
    s.deg("step_deg", c.gripper.step);
    s.deg("wrap_max_deg", c.gripper.wrap_max);
    s.get("max_steps", c.gripper.max_steps);
    s.get("max_finger_speed", c.gripper.max_finger_speed);
  });

  root.child("impedance", [&](Section& s) {
    s.get("stiffness_translational", c.impedance.stiffness_translational);
    s.get("stiffness_rotational", c.impedance.stiffness_rotational);
    s.get("damping_ratio", c.impedance.damping_ratio);
    s.get("virtual_mass", c.impedance.virtual_mass);
  });

  root.child("thresholds", [&](Section& s) {
    s.get("force_abs", c.thresholds.force_abs);
    s.get("torque_abs", c.thresholds.torque_abs);
    s.get("force_rate", c.thresholds.force_rate);
    s.get("torque_rate", c.thresholds.torque_rate);
    s.get("rate_window", c.thresholds.rate_window);
  });

  root.child("sensor", [&](Section& s) {
    s.get("noise_std_force", c.sensor.noise_std_force);
    s.get("noise_std_torque", c.sensor.noise_std_torque);
    s.vec3("bias_force", c.sensor.bias.force);
    s.vec3("bias_torque", c.sensor.bias.torque);
  });

  root.child("scene", [&](Section& s) {
    s.child("crate", [&](Section& k) {
      k.get("length", c.scene.crate.length);
      k.get("width", c.scene.crate.width);
      k.get("height", c.scene.crate.height);
    });
    s.child("punnet", [&](Section& k) {
      k.get("length", c.scene.punnet.length);
      k.get("width", c.scene.punnet.width);
      k.get("height", c.scene.punnet.height);
      k.vec3("position", c.scene.punnet.pose.position);
    });
    s.vec3("pick_position", c.scene.pick_pose.position);
    s.vec3("lime_semi_axes", c.scene.lime_semi_axes);
    s.get("pickle_radius_min", c.scene.pickle_radius_min);
    s.get("pickle_radius_max", c.scene.pickle_radius_max);
    s.get("fill_fraction", c.scene.fill_fraction);
    s.get("settle_candidates", c.scene.settle_candidates);
    s.get("max_attempts", c.scene.max_attempts);
    s.get("sparse_extra_min", c.scene.sparse_extra_min);
    s.get("sparse_extra_max", c.scene.sparse_extra_max);
    s.get("sparse_jitter", c.scene.sparse_jitter);
    s.get("sparse_separation", c.scene.sparse_separation);
    s.get("rigid_penetration_tol", c.scene.rigid_penetration_tol);
    s.get("soft_overlap_fraction", c.scene.soft_overlap_fraction);
    s.get("clearance_tol", c.scene.clearance_tol);
    s.get("lateral_search_radius", c.scene.lateral_search_radius);
    s.get("lift_margin", c.scene.lift_margin);
    s.get("drop_threshold", c.scene.drop_threshold);
    s.get("drop_jitter", c.scene.drop_jitter);
  });

  root.child("protocol", [&](Section& s) {
    auto& p = c.protocol;
    s.get("init_move_duration", p.init_move_duration);
    s.get("init_overhead", p.init_overhead);
    s.get("approach_duration", p.approach_duration);
    s.get("approach_overhead", p.approach_overhead);
    s.get("lift_duration", p.lift_duration);
    s.get("transfer_duration", p.transfer_duration);
    s.get("transport_overhead", p.transport_overhead);
    s.get("descent_speed", p.descent_speed);
    s.get("approach_height", p.approach_height);
    s.get("max_descent", p.max_descent);
    s.deg("tool_yaw_deg", p.tool_yaw);
    s.get("dt", p.dt);
    s.vec3("home_position", p.home_position);
    s.vec3("start_position", p.start_position);
    s.get("punnet_clearance", p.punnet_clearance);
    s.get("transport_samples", p.transport_samples);
    s.get("record_traces", p.record_traces);
  });

  root.child("matrix", [&](Section& s) {
    s.enum_list("objects", c.matrix.objects, parse_object);
    s.enum_list("picks", c.matrix.picks, parse_pick);
    s.get("angles_deg", c.matrix.angles_deg);
    s.enum_list("configs", c.matrix.configs, parse_spread);
    s.get("repetitions", c.matrix.repetitions);
  });

  root.child("reference", [&](Section& s) {
    s.get("phase_means_s", c.reference.phase_means_s);
    s.get("phase_total_s", c.reference.phase_total_s);
    s.get("human_uph_ratio", c.reference.human_uph_ratio);
  });
  root.finish();
  return c;
}

json config_to_json(const RunConfig& c) {
  const auto& g = c.gripper;
  const auto& sc = c.scene;
  const auto& p = c.protocol;
  json j;
  j["master_seed"] = c.master_seed;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  j["gripper"] = {{"linkage", linkage_json(g.linkages[0])},
                  {"flexion_min_deg", rad2deg(g.flexion_min)},
                  {"flexion_max_deg", rad2deg(g.flexion_max)},
                  {"flexion_open_deg", rad2deg(g.flexion_open)},
                  {"pair_gap", g.pair_gap},
                  {"parallel_azimuths_deg", to_deg(g.parallel_azimuths)},
                  {"concentric_azimuths_deg", to_deg(g.concentric_azimuths)},
                  {"tip_threshold", g.tip_threshold},
                  {"step_deg", rad2deg(g.step)},
                  {"wrap_max_deg", rad2deg(g.wrap_max)},
                  {"max_steps", g.max_steps},
                  {"max_finger_speed", g.max_finger_speed}};
  j["impedance"] = {{"stiffness_translational", c.impedance.stiffness_translational},
                    {"stiffness_rotational", c.impedance.stiffness_rotational},
                    {"damping_ratio", c.impedance.damping_ratio},
                    {"virtual_mass", c.impedance.virtual_mass}};
  j["thresholds"] = {{"force_abs", c.thresholds.force_abs},
                     {"torque_abs", c.thresholds.torque_abs},
                     {"force_rate", c.thresholds.force_rate},
                     {"torque_rate", c.thresholds.torque_rate},
                     {"rate_window", c.thresholds.rate_window}};
  j["sensor"] = {{"noise_std_force", c.sensor.noise_std_force},
                 {"noise_std_torque", c.sensor.noise_std_torque},
                 {"bias_force", vec_json(c.sensor.bias.force)},
                 {"bias_torque", vec_json(c.sensor.bias.torque)}};
  j["scene"] = {
      {"crate", {{"length", sc.crate.length}, {"width", sc.crate.width}, {"height", sc.crate.height}}},
      {"punnet",
       {{"length", sc.punnet.length},
        {"width", sc.punnet.width},
        {"height", sc.punnet.height},
        {"position", vec_json(sc.punnet.pose.position)}}},
      {"pick_position", vec_json(sc.pick_pose.position)},
      {"lime_semi_axes", vec_json(sc.lime_semi_axes)},
      {"pickle_radius_min", sc.pickle_radius_min},
      {"pickle_radius_max", sc.pickle_radius_max},
      {"fill_fraction", sc.fill_fraction},
      {"settle_candidates", sc.settle_candidates},
      {"max_attempts", sc.max_attempts},
      {"sparse_extra_min", sc.sparse_extra_min},
      {"sparse_extra_max", sc.sparse_extra_max},
      {"sparse_jitter", sc.sparse_jitter},
      {"sparse_separation", sc.sparse_separation},
      {"rigid_penetration_tol", sc.rigid_penetration_tol},
      {"soft_overlap_fraction", sc.soft_overlap_fraction},
      {"clearance_tol", sc.clearance_tol},
      {"lateral_search_radius", sc.lateral_search_radius},
      {"lift_margin", sc.lift_margin},
      {"drop_threshold", sc.drop_threshold},
      {"drop_jitter", sc.drop_jitter}};
  j["protocol"] = {{"init_move_duration", p.init_move_duration},
                   {"init_overhead", p.init_overhead},
                   {"approach_duration", p.approach_duration},
                   {"approach_overhead", p.approach_overhead},
                   {"lift_duration", p.lift_duration},
                   {"transfer_duration", p.transfer_duration},
                   {"transport_overhead", p.transport_overhead},
                   {"descent_speed", p.descent_speed},
                   {"approach_height", p.approach_height},
                   {"max_descent", p.max_descent},
                   {"tool_yaw_deg", rad2deg(p.tool_yaw)},
                   {"dt", p.dt},
                   {"home_position", vec_json(p.home_position)},
                   {"start_position", vec_json(p.start_position)},
                   {"punnet_clearance", p.punnet_clearance},
                   {"transport_samples", p.transport_samples},
                   {"record_traces", p.record_traces}};
  j["matrix"] = {{"objects", enum_names(c.matrix.objects)},
                 {"picks", enum_names(c.matrix.picks)},
                 {"angles_deg", c.matrix.angles_deg},
                 {"configs", enum_names(c.matrix.configs)},
                 {"repetitions", c.matrix.repetitions}};
  j["reference"] = {{"phase_means_s", c.reference.phase_means_s},
                    {"phase_total_s", c.reference.phase_total_s},
                    {"human_uph_ratio", c.reference.human_uph_ratio}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  RunConfig c = config_from_json(j);
  c.validate();
  return c;
}

}  // namespace pickbench
