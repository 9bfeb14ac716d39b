// Copyright 2026 The uatraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "uatraj/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "uatraj/errors.hpp"

namespace uatraj {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kConfig, path + ": " + msg);
}

json parse_text(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(what, e.what());
  }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(path, "unknown key '" + item.key() + "'");
  }
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

Vector3d as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected 3 numbers");
  Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = as_double(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Vector6d as_vec6(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 6) fail(path, "expected 6 numbers");
  Vector6d v;
  for (int i = 0; i < 6; ++i) v(i) = as_double(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// A scalar (times identity), a 6-vector diagonal, or a full 6x6 matrix.
Matrix6d as_matrix6(const json& j, const std::string& path) {
  if (j.is_number()) return as_double(j, path) * Matrix6d::Identity();
  if (j.is_array() && j.size() == 6 && j[0].is_number()) {
    return as_vec6(j, path).asDiagonal();
  }
  if (j.is_array() && j.size() == 6) {
    Matrix6d m;
    for (int r = 0; r < 6; ++r) {
      m.row(r) = as_vec6(j[r], path + "[" + std::to_string(r) + "]").transpose();
    }
    return m;
  }
  fail(path, "expected a scalar, 6 diagonal entries, or a 6x6 matrix");
}

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Matrix6d& m) {
  json a = json::array();
  for (int r = 0; r < 6; ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

json pose_json(const Pose& p) {
  return {{"position", vec_json(p.position)},
          {"orientation", vec_json(p.orientation)}};
}

Pose parse_pose(const json& j, const std::string& path) {
  check_keys(j, path, {"position", "orientation"});
  if (!j.contains("position") || !j.contains("orientation")) {
    fail(path, "requires 'position' and 'orientation'");
  }
  return Pose(as_vec3(j["position"], child(path, "position")),
              as_vec3(j["orientation"], child(path, "orientation")));
}

json camera_json(const CameraModel& c) {
  return {{"position", vec_json(c.pose.position)},
          {"orientation", vec_json(c.pose.orientation)},
          {"fx", c.fx},
          {"fy", c.fy},
          {"cx", c.cx},
          {"cy", c.cy},
          {"width", c.width},
          {"height", c.height}};
}

CameraModel parse_camera(const json& j, const std::string& path,
                         const CameraModel& defaults,
                         bool allow_step = false) {
  if (allow_step) {
    check_keys(j, path, {"step", "position", "orientation", "fx", "fy", "cx",
                         "cy", "width", "height"});
  } else {
    check_keys(j, path, {"position", "orientation", "fx", "fy", "cx", "cy",
                         "width", "height"});
  }
  CameraModel c = defaults;
  if (j.contains("position")) c.pose.position = as_vec3(j["position"], child(path, "position"));
  if (j.contains("orientation")) {
    c.pose.orientation = as_vec3(j["orientation"], child(path, "orientation"));
  }
  if (j.contains("fx")) c.fx = as_double(j["fx"], child(path, "fx"));
  if (j.contains("fy")) c.fy = as_double(j["fy"], child(path, "fy"));
  if (j.contains("cx")) c.cx = as_double(j["cx"], child(path, "cx"));
  if (j.contains("cy")) c.cy = as_double(j["cy"], child(path, "cy"));
  if (j.contains("width")) c.width = as_int(j["width"], child(path, "width"));
  if (j.contains("height")) c.height = as_int(j["height"], child(path, "height"));
  try {
    c.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return c;
}

json schedule_json(const CameraSchedule& cams) {
  json a = json::array();
  for (const auto& [step, cam] : cams.entries()) {
    json c = camera_json(cam);
    c["step"] = step;
    a.push_back(c);
  }
  return a;
}

CameraSchedule parse_schedule(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  std::vector<std::pair<int, CameraModel>> entries;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const int step = j[i].contains("step") ? as_int(j[i]["step"], child(p, "step")) : 0;
    entries.emplace_back(step, parse_camera(j[i], p, CameraModel{}, true));
  }
  try {
    return CameraSchedule(std::move(entries));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

const char* fov_name(FovNormalization n) {
  return n == FovNormalization::kNone ? "none" : "half_diagonal";
}

FovNormalization parse_fov(const json& j, const std::string& path) {
  if (j == "half_diagonal") return FovNormalization::kHalfDiagonal;
  if (j == "none") return FovNormalization::kNone;
  fail(path, "expected \"half_diagonal\" or \"none\"");
}

NoiseOverrides parse_noise(const json& j, const std::string& path) {
  check_keys(j, path, {"w_pos0", "w_ori0", "v_depth0", "v_fov0", "v_ori0",
                       "d_star", "o_star", "fov_normalization"});
  NoiseOverrides o;
  auto mat = [&](const char* key, std::optional<Matrix6d>& dst) {
    if (j.contains(key)) dst = as_matrix6(j[key], child(path, key));
  };
  mat("w_pos0", o.w_pos0);
  mat("w_ori0", o.w_ori0);
  mat("v_depth0", o.v_depth0);
  mat("v_fov0", o.v_fov0);
  mat("v_ori0", o.v_ori0);
  if (j.contains("d_star")) o.d_star = as_double(j["d_star"], child(path, "d_star"));
  if (j.contains("o_star")) o.o_star = as_vec3(j["o_star"], child(path, "o_star"));
  if (j.contains("fov_normalization")) {
    o.fov_normalization =
        parse_fov(j["fov_normalization"], child(path, "fov_normalization"));
  }
  return o;
}

json noise_overrides_json(const NoiseOverrides& o) {
  json j = json::object();
  if (o.w_pos0) j["w_pos0"] = mat_json(*o.w_pos0);
  if (o.w_ori0) j["w_ori0"] = mat_json(*o.w_ori0);
  if (o.v_depth0) j["v_depth0"] = mat_json(*o.v_depth0);
  if (o.v_fov0) j["v_fov0"] = mat_json(*o.v_fov0);
  if (o.v_ori0) j["v_ori0"] = mat_json(*o.v_ori0);
  if (o.d_star) j["d_star"] = *o.d_star;
  if (o.o_star) j["o_star"] = vec_json(*o.o_star);
  if (o.fov_normalization) j["fov_normalization"] = fov_name(*o.fov_normalization);
  return j;
}

json noise_json(const NoiseConfig& n) {
  return {{"w_pos0", mat_json(n.w_pos0)},
          {"w_ori0", mat_json(n.w_ori0)},
          {"v_depth0", mat_json(n.v_depth0)},
          {"v_fov0", mat_json(n.v_fov0)},
          {"v_ori0", mat_json(n.v_ori0)},
          {"d_star", n.d_star},
          {"o_star", vec_json(n.o_star)},
          {"fov_normalization", fov_name(n.fov_normalization)}};
}

json metadata_json(const Metadata& meta) {
  json config;
  try {
    config = json::parse(meta.config);
  } catch (const json::parse_error&) {
    config = meta.config;
  }
  return {{"command", meta.command}, {"seed", meta.seed}, {"config", config}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// CSV files start with a single comment line holding the metadata object.
std::string csv_header(const Metadata& meta) {
  return "# " + metadata_json(meta).dump() + "\r\n";
}

class CsvRow {
 public:
  CsvRow& add(const std::string& s) {
    sep();
    line_ += csv_field(s);
    return *this;
  }
  CsvRow& add(double v) {
    sep();
    line_ += format_double(v);
    return *this;
  }
  CsvRow& add(int v) {
    sep();
    line_ += std::to_string(v);
    return *this;
  }
  std::string str() const { return line_ + "\r\n"; }

 private:
  void sep() {
    if (!first_) line_ += ',';
    first_ = false;
  }
  std::string line_;
  bool first_ = true;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double safe_entropy(const Matrix6d& cov) {
  try {
    return entropy(cov);
  } catch (const Error&) {
    return std::nan("");
  }
}

json belief_json(const Belief& b) {
  return {{"mean", vec_json(b.mean)}, {"covariance", mat_json(b.covariance)}};
}

json step_json(const StepRecord& s) {
  return {{"step", s.step},
          {"predicted", belief_json(s.predicted)},
          {"updated", belief_json(s.updated)},
          {"motion_cov", mat_json(s.motion_cov)},
          {"obs_cov", mat_json(s.obs_cov)},
          {"gain", mat_json(s.gain)},
          {"trace", s.updated.covariance.trace()},
          {"entropy", safe_entropy(s.updated.covariance)}};
}

// (step, belief after that step's update) in order, including step 0.
std::vector<const StepRecord*> trace_steps(const BeliefTrace& trace) {
  std::vector<const StepRecord*> out;
  if (trace.initial) out.push_back(&*trace.initial);
  for (const auto& s : trace.steps) out.push_back(&s);
  return out;
}

void plot_rows(std::string& out, const std::string& prefix_scenario,
               const std::string& variant, const Trajectory& traj,
               const CameraSchedule& cams, const BeliefTrace& trace) {
  std::vector<const StepRecord*> steps = trace_steps(trace);
  for (int t = 0; t <= traj.horizon(); ++t) {
    const Pose& w = traj.waypoints[t];
    const CameraModel& cam = cams.at(t);
    const double depth = camera_depth(cam, w.position);
    Vector2d px(std::nan(""), std::nan(""));
    if (depth > 0.0) px = project(cam, w.position);
    double tr = std::nan(""), ent = std::nan("");
    for (const StepRecord* s : steps) {
      if (s->step == t) {
        tr = s->updated.covariance.trace();
        ent = safe_entropy(s->updated.covariance);
      }
    }
    CsvRow row;
    if (!prefix_scenario.empty()) row.add(prefix_scenario).add(variant);
    row.add(t).add(tr).add(ent);
    for (int i = 0; i < 3; ++i) row.add(w.position(i));
    for (int i = 0; i < 3; ++i) row.add(w.orientation(i));
    row.add(px.x()).add(px.y()).add(depth);
    out += row.str();
  }
}

const char* kPlotColumns =
    "step,trace,entropy,x,y,z,ox,oy,oz,u,v,depth";

}  // namespace

void NoiseOverrides::apply(NoiseConfig& cfg) const {
  if (w_pos0) cfg.w_pos0 = *w_pos0;
  if (w_ori0) cfg.w_ori0 = *w_ori0;
  if (v_depth0) cfg.v_depth0 = *v_depth0;
  if (v_fov0) cfg.v_fov0 = *v_fov0;
  if (v_ori0) cfg.v_ori0 = *v_ori0;
  if (d_star) cfg.d_star = *d_star;
  if (o_star) cfg.o_star = *o_star;
  if (fov_normalization) cfg.fov_normalization = *fov_normalization;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::kConfig, "write failed for '" + path + "'");
}

Scenario parse_scenario(std::string_view json_text) {
  const json j = parse_text(json_text, "scenario");
  check_keys(j, "scenario", {"start", "goal", "horizon", "camera", "cameras",
                             "noise", "prior_covariance", "initial_update",
                             "seed"});
  for (const char* key : {"start", "goal"}) {
    if (!j.contains(key)) fail("scenario", std::string("missing '") + key + "'");
  }
  Scenario sc;
  sc.start = parse_pose(j["start"], "start");
  sc.goal = parse_pose(j["goal"], "goal");
  if (j.contains("horizon")) sc.horizon = as_int(j["horizon"], "horizon");
  if (sc.horizon < 1) fail("horizon", "must be >= 1");
  if (j.contains("camera") && j.contains("cameras")) {
    fail("scenario", "give either 'camera' or 'cameras', not both");
  }
  if (j.contains("cameras")) {
    sc.cameras = parse_schedule(j["cameras"], "cameras");
  } else {
    sc.cameras = CameraSchedule(
        j.contains("camera") ? parse_camera(j["camera"], "camera", CameraModel{})
                             : CameraModel{});
  }
  NoiseOverrides overrides;
  if (j.contains("noise")) overrides = parse_noise(j["noise"], "noise");
  overrides.apply(sc.noise);
  if (!overrides.o_star) {
    sc.noise.o_star = default_o_star(sc.goal, sc.cameras.at(sc.horizon));
  }
  sc.prior = default_prior(sc.start);
  if (j.contains("prior_covariance")) {
    sc.prior.covariance = as_matrix6(j["prior_covariance"], "prior_covariance");
  }
  if (j.contains("initial_update")) {
    sc.propagation.initial_update = as_bool(j["initial_update"], "initial_update");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected an unsigned integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  try {
    sc.validate();
  } catch (const Error& e) {
    fail("scenario", e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_scenario(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& sc) {
  const json j = {{"start", pose_json(sc.start)},
                  {"goal", pose_json(sc.goal)},
                  {"horizon", sc.horizon},
                  {"cameras", schedule_json(sc.cameras)},
                  {"noise", noise_json(sc.noise)},
                  {"prior_covariance", mat_json(sc.prior.covariance)},
                  {"initial_update", sc.propagation.initial_update},
                  {"seed", sc.seed}};
  return dump(j);
}

RunSettings parse_run_settings(std::string_view json_text) {
  const json j = parse_text(json_text, "config");
  check_keys(j, "config", {"optimizer", "mask", "worst_case_factor", "noise",
                           "sampling"});
  RunSettings s;
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    const std::string p = "optimizer";
    check_keys(o, p, {"max_iterations", "history_size", "c1", "c2",
                      "max_line_search", "initial_step", "gradient_mode",
                      "fd_step", "convergence_threshold", "pose_loss",
                      "line_search", "pin_tolerance"});
    OptimizerConfig& c = s.optimizer;
    if (o.contains("max_iterations")) c.max_iterations = as_int(o["max_iterations"], child(p, "max_iterations"));
    if (o.contains("history_size")) c.history_size = as_int(o["history_size"], child(p, "history_size"));
    if (o.contains("c1")) c.c1 = as_double(o["c1"], child(p, "c1"));
    if (o.contains("c2")) c.c2 = as_double(o["c2"], child(p, "c2"));
    if (o.contains("max_line_search")) c.max_line_search = as_int(o["max_line_search"], child(p, "max_line_search"));
    if (o.contains("initial_step")) c.initial_step = as_double(o["initial_step"], child(p, "initial_step"));
    if (o.contains("gradient_mode")) {
      const json& g = o["gradient_mode"];
      if (g == "analytic") {
        c.gradient_mode = GradientMode::kAnalytic;
      } else if (g == "fd") {
        c.gradient_mode = GradientMode::kFiniteDifference;
      } else {
        fail(child(p, "gradient_mode"), "expected \"analytic\" or \"fd\"");
      }
    }
    if (o.contains("fd_step")) c.fd_step = as_double(o["fd_step"], child(p, "fd_step"));
    if (o.contains("convergence_threshold")) {
      c.convergence_threshold =
          as_double(o["convergence_threshold"], child(p, "convergence_threshold"));
    }
    if (o.contains("pose_loss")) c.pose_loss = as_bool(o["pose_loss"], child(p, "pose_loss"));
    if (o.contains("line_search")) {
      const json& l = o["line_search"];
      if (l == "strong_wolfe") {
        c.line_search = LineSearchKind::kStrongWolfe;
      } else if (l == "weak_wolfe") {
        c.line_search = LineSearchKind::kWeakWolfe;
      } else {
        fail(child(p, "line_search"), "expected \"strong_wolfe\" or \"weak_wolfe\"");
      }
    }
    if (o.contains("pin_tolerance")) c.pin_tolerance = as_double(o["pin_tolerance"], child(p, "pin_tolerance"));
    try {
      c.validate();
    } catch (const Error& e) {
      fail(p, e.what());
    }
  }
  if (j.contains("mask")) {
    const json& m = j["mask"];
    check_keys(m, "mask", {"use_depth", "use_fov", "use_orientation", "use_pose_loss"});
    if (m.contains("use_depth")) s.mask.use_depth = as_bool(m["use_depth"], "mask.use_depth");
    if (m.contains("use_fov")) s.mask.use_fov = as_bool(m["use_fov"], "mask.use_fov");
    if (m.contains("use_orientation")) {
      s.mask.use_orientation = as_bool(m["use_orientation"], "mask.use_orientation");
    }
    if (m.contains("use_pose_loss")) {
      s.mask.use_pose_loss = as_bool(m["use_pose_loss"], "mask.use_pose_loss");
    }
  }
  if (j.contains("worst_case_factor")) {
    s.worst_case_factor = as_double(j["worst_case_factor"], "worst_case_factor");
    if (s.worst_case_factor < 1.0) fail("worst_case_factor", "must be >= 1");
  }
  if (j.contains("noise")) s.noise = parse_noise(j["noise"], "noise");
  if (j.contains("sampling")) {
    const json& b = j["sampling"];
    const std::string p = "sampling";
    check_keys(b, p, {"workspace_center", "workspace_size", "min_depth",
                      "max_depth", "min_tool_angle", "max_tool_angle",
                      "camera_position_range", "camera_angle_range",
                      "intrinsics", "horizon", "max_attempts",
                      "o_star_from_goal"});
    SamplingBounds& sb = s.sampling;
    if (b.contains("workspace_center")) sb.workspace_center = as_vec3(b["workspace_center"], child(p, "workspace_center"));
    if (b.contains("workspace_size")) sb.workspace_size = as_double(b["workspace_size"], child(p, "workspace_size"));
    if (b.contains("min_depth")) sb.min_depth = as_double(b["min_depth"], child(p, "min_depth"));
    if (b.contains("max_depth")) sb.max_depth = as_double(b["max_depth"], child(p, "max_depth"));
    if (b.contains("min_tool_angle")) sb.min_tool_angle = as_double(b["min_tool_angle"], child(p, "min_tool_angle"));
    if (b.contains("max_tool_angle")) sb.max_tool_angle = as_double(b["max_tool_angle"], child(p, "max_tool_angle"));
    if (b.contains("camera_position_range")) {
      sb.camera_position_range = as_double(b["camera_position_range"], child(p, "camera_position_range"));
    }
    if (b.contains("camera_angle_range")) {
      sb.camera_angle_range = as_double(b["camera_angle_range"], child(p, "camera_angle_range"));
    }
    if (b.contains("intrinsics")) {
      sb.intrinsics = parse_camera(b["intrinsics"], child(p, "intrinsics"), CameraModel{});
    }
    if (b.contains("horizon")) sb.horizon = as_int(b["horizon"], child(p, "horizon"));
    if (b.contains("o_star_from_goal")) {
      sb.o_star_from_goal = as_bool(b["o_star_from_goal"], child(p, "o_star_from_goal"));
    }
    if (b.contains("max_attempts")) sb.max_attempts = as_int(b["max_attempts"], child(p, "max_attempts"));
    if (sb.horizon < 1) fail(child(p, "horizon"), "must be >= 1");
    if (sb.max_attempts < 1) fail(child(p, "max_attempts"), "must be >= 1");
    if (!(sb.workspace_size > 0.0)) fail(child(p, "workspace_size"), "must be positive");
    if (!(sb.min_depth < sb.max_depth)) fail(p, "min_depth must be below max_depth");
    if (!(sb.min_tool_angle <= sb.max_tool_angle)) {
      fail(p, "min_tool_angle must not exceed max_tool_angle");
    }
  }
  return s;
}

RunSettings load_run_settings(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_run_settings(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
}

std::string run_settings_to_json(const RunSettings& s) {
  const OptimizerConfig& c = s.optimizer;
  const SamplingBounds& b = s.sampling;
  const json j = {
      {"optimizer",
       {{"max_iterations", c.max_iterations},
        {"history_size", c.history_size},
        {"c1", c.c1},
        {"c2", c.c2},
        {"max_line_search", c.max_line_search},
        {"initial_step", c.initial_step},
        {"gradient_mode",
         c.gradient_mode == GradientMode::kAnalytic ? "analytic" : "fd"},
        {"fd_step", c.fd_step},
        {"convergence_threshold", c.convergence_threshold},
        {"pose_loss", c.pose_loss},
        {"line_search", c.line_search == LineSearchKind::kStrongWolfe
                            ? "strong_wolfe"
                            : "weak_wolfe"},
        {"pin_tolerance", c.pin_tolerance}}},
      {"mask",
       {{"use_depth", s.mask.use_depth},
        {"use_fov", s.mask.use_fov},
        {"use_orientation", s.mask.use_orientation},
        {"use_pose_loss", s.mask.use_pose_loss}}},
      {"worst_case_factor", s.worst_case_factor},
      {"noise", noise_overrides_json(s.noise)},
      {"sampling",
       {{"workspace_center", vec_json(b.workspace_center)},
        {"workspace_size", b.workspace_size},
        {"min_depth", b.min_depth},
        {"max_depth", b.max_depth},
        {"min_tool_angle", b.min_tool_angle},
        {"max_tool_angle", b.max_tool_angle},
        {"camera_position_range", b.camera_position_range},
        {"camera_angle_range", b.camera_angle_range},
        {"intrinsics", camera_json(b.intrinsics)},
        {"horizon", b.horizon},
        {"max_attempts", b.max_attempts},
        {"o_star_from_goal", b.o_star_from_goal}}}};
  return j.dump();
}

std::string trajectory_to_json(const Trajectory& traj,
                               const CameraSchedule& cams,
                               const Metadata& meta) {
  json wps = json::array();
  for (const Pose& p : traj.waypoints) wps.push_back(vec_json(p.vector()));
  const json j = {{"metadata", metadata_json(meta)},
                  {"horizon", traj.horizon()},
                  {"waypoints", wps},
                  {"cameras", schedule_json(cams)}};
  return dump(j);
}

Trajectory parse_trajectory(std::string_view json_text) {
  const json j = parse_text(json_text, "trajectory");
  check_keys(j, "trajectory", {"metadata", "horizon", "waypoints", "cameras"});
  if (!j.contains("waypoints") || !j["waypoints"].is_array()) {
    fail("waypoints", "expected an array of 6-vectors");
  }
  Trajectory traj;
  for (size_t i = 0; i < j["waypoints"].size(); ++i) {
    traj.waypoints.push_back(Pose::from_vector(
        as_vec6(j["waypoints"][i], "waypoints[" + std::to_string(i) + "]")));
  }
  if (j.contains("horizon") && as_int(j["horizon"], "horizon") != traj.horizon()) {
    fail("horizon", "does not match the number of waypoints");
  }
  try {
    traj.validate();
  } catch (const Error& e) {
    fail("trajectory", e.what());
  }
  return traj;
}

Trajectory load_trajectory(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_trajectory(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
}

std::string belief_trace_to_json(const BeliefTrace& trace,
                                 const Metadata& meta) {
  json steps = json::array();
  for (const StepRecord* s : trace_steps(trace)) steps.push_back(step_json(*s));
  json j = {{"metadata", metadata_json(meta)},
            {"initial_update", trace.initial.has_value()},
            {"steps", steps}};
  if (!trace_steps(trace).empty()) {
    const Matrix6d& cov = trace.final_belief().covariance;
    j["final_trace"] = cov.trace();
    j["final_entropy"] = safe_entropy(cov);
  }
  return dump(j);
}

std::string history_to_csv(const std::vector<IterationRecord>& history,
                           const Metadata& meta) {
  std::string out = csv_header(meta);
  out += "iteration,trace,pose_position,pose_orientation,total,gradient_norm,step,fallback\r\n";
  for (const IterationRecord& r : history) {
    out += CsvRow()
               .add(r.iteration)
               .add(r.loss.trace)
               .add(r.loss.pose_position)
               .add(r.loss.pose_orientation)
               .add(r.loss.total)
               .add(r.gradient_norm)
               .add(r.step)
               .add(r.fallback ? 1 : 0)
               .str();
  }
  return out;
}

std::string rollout_report_to_json(const std::vector<std::string>& names,
                                   const std::vector<RolloutReport>& reports,
                                   const Metadata& meta) {
  json vs = json::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    const RolloutReport& r = reports[i];
    vs.push_back({{"name", i < names.size() ? names[i] : std::to_string(i)},
                  {"n_trials", r.trials.size()},
                  {"failures", r.failures},
                  {"position_mean", r.position_mean},
                  {"position_std", r.position_std},
                  {"orientation_mean", r.orientation_mean},
                  {"orientation_std", r.orientation_std},
                  {"trace_noisy", r.trace_mean},
                  {"trace_ml", r.ml_trace},
                  {"entropy_noisy", r.entropy_mean},
                  {"entropy_ml", r.ml_entropy}});
  }
  return dump({{"metadata", metadata_json(meta)}, {"variants", vs}});
}

std::string trials_to_csv(const std::vector<std::string>& names,
                          const std::vector<RolloutReport>& reports,
                          const Metadata& meta) {
  std::string out = csv_header(meta);
  out += "variant,trial,ok,position_error,orientation_error,trace,entropy,failure\r\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::string name = i < names.size() ? names[i] : std::to_string(i);
    for (size_t k = 0; k < reports[i].trials.size(); ++k) {
      const RolloutRow& r = reports[i].trials[k];
      out += CsvRow()
                 .add(name)
                 .add(static_cast<int>(k))
                 .add(r.ok ? 1 : 0)
                 .add(r.position_error)
                 .add(r.orientation_error)
                 .add(r.trace)
                 .add(r.entropy)
                 .add(r.failure)
                 .str();
    }
  }
  return out;
}

std::string ablation_to_json(const AblationResult& result,
                             const Metadata& meta) {
  json variants = json::array();
  for (size_t v = 0; v < result.suite.size(); ++v) {
    json raw = json::object(), rel = json::object();
    for (int m = 0; m < kMetricCount; ++m) {
      raw[metric_name(m)] = result.raw[v][m];
      rel[metric_name(m)] = result.relative[v][m];
    }
    variants.push_back({{"name", result.suite[v].name},
                        {"relative", rel},
                        {"raw", raw}});
  }
  json scenarios = json::array();
  for (const ScenarioOutcome& sc : result.scenarios) {
    json s = {{"index", sc.index}, {"ok", sc.ok}};
    if (!sc.ok) s["failure"] = sc.failure;
    scenarios.push_back(s);
  }
  const json j = {{"metadata", metadata_json(meta)},
                  {"n_scenarios", result.scenarios.size()},
                  {"failed_scenarios", result.failed_scenarios},
                  {"baseline", result.suite[result.baseline_index].name},
                  {"variants", variants},
                  {"scenarios", scenarios}};
  return dump(j);
}

std::string ablation_table_csv(const AblationResult& result,
                               const Metadata& meta) {
  std::string out = csv_header(meta);
  CsvRow header;
  header.add(std::string("variant"));
  for (int m = 0; m < kMetricCount; ++m) header.add(std::string("rel_") + metric_name(m));
  for (int m = 0; m < kMetricCount; ++m) header.add(std::string("raw_") + metric_name(m));
  out += header.str();
  for (size_t v = 0; v < result.suite.size(); ++v) {
    CsvRow row;
    row.add(result.suite[v].name);
    for (int m = 0; m < kMetricCount; ++m) row.add(result.relative[v][m]);
    for (int m = 0; m < kMetricCount; ++m) row.add(result.raw[v][m]);
    out += row.str();
  }
  return out;
}

std::string ablation_trials_csv(const AblationResult& result,
                                const Metadata& meta) {
  std::string out = csv_header(meta);
  out += "scenario,variant,trial,ok,position_error,orientation_error,trace,entropy,failure\r\n";
  for (const ScenarioOutcome& sc : result.scenarios) {
    for (size_t v = 0; v < sc.variants.size(); ++v) {
      const auto& trials = sc.variants[v].trials;
      for (size_t k = 0; k < trials.size(); ++k) {
        const RolloutRow& r = trials[k];
        out += CsvRow()
                   .add(sc.index)
                   .add(result.suite[v].name)
                   .add(static_cast<int>(k))
                   .add(r.ok ? 1 : 0)
                   .add(r.position_error)
                   .add(r.orientation_error)
                   .add(r.trace)
                   .add(r.entropy)
                   .add(r.failure)
                   .str();
      }
    }
  }
  return out;
}

std::string ablation_plot_csv(const AblationResult& result,
                              const Metadata& meta) {
  std::string out = csv_header(meta);
  out += std::string("scenario,variant,") + kPlotColumns + "\r\n";
  for (const ScenarioOutcome& sc : result.scenarios) {
    if (!sc.ok) continue;
    for (size_t v = 0; v < sc.variants.size(); ++v) {
      plot_rows(out, std::to_string(sc.index), result.suite[v].name,
                sc.variants[v].trajectory, sc.scenario.cameras,
                sc.variants[v].ml_trace);
    }
  }
  return out;
}

std::string trace_plot_csv(const Trajectory& traj, const CameraSchedule& cams,
                           const BeliefTrace& trace, const Metadata& meta) {
  std::string out = csv_header(meta);
  out += std::string(kPlotColumns) + "\r\n";
  plot_rows(out, "", "", traj, cams, trace);
  return out;
}

}  // namespace uatraj
