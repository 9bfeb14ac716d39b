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
#ifndef UATRAJ_IO_HPP_
#define UATRAJ_IO_HPP_

// File formats: scenario and run-config files (strict JSON schemas),
// trajectory files, and report writers. All floating-point output uses
// 17 significant digits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uatraj/belief.hpp"
#include "uatraj/optimizer.hpp"
#include "uatraj/sim_harness.hpp"

namespace uatraj {

// Embedded in every artifact. `config` is a serialized JSON object.
struct Metadata {
  std::string command;
  std::uint64_t seed = 0;
  std::string config = "{}";
};

struct NoiseOverrides {
  std::optional<Matrix6d> w_pos0, w_ori0, v_depth0, v_fov0, v_ori0;
  std::optional<double> d_star;
  std::optional<Vector3d> o_star;
  std::optional<FovNormalization> fov_normalization;

  void apply(NoiseConfig& cfg) const;
};

struct RunSettings {
  OptimizerConfig optimizer;
  AblationMask mask;
  double worst_case_factor = 1.0;
  NoiseOverrides noise;
  SamplingBounds sampling;
};

// All parsers throw Error(kConfig) naming the offending key or path.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

RunSettings parse_run_settings(std::string_view json_text);
RunSettings load_run_settings(const std::string& path);
std::string run_settings_to_json(const RunSettings& settings);

std::string trajectory_to_json(const Trajectory& traj,
                               const CameraSchedule& cams,
                               const Metadata& meta);
Trajectory parse_trajectory(std::string_view json_text);
Trajectory load_trajectory(const std::string& path);

std::string belief_trace_to_json(const BeliefTrace& trace,
                                 const Metadata& meta);

// iteration, trace, pose_position, pose_orientation, total, gradient_norm
std::string history_to_csv(const std::vector<IterationRecord>& history,
                           const Metadata& meta);

std::string rollout_report_to_json(const std::vector<std::string>& names,
                                   const std::vector<RolloutReport>& reports,
                                   const Metadata& meta);
std::string trials_to_csv(const std::vector<std::string>& names,
                          const std::vector<RolloutReport>& reports,
                          const Metadata& meta);

std::string ablation_to_json(const AblationResult& result,
                             const Metadata& meta);
std::string ablation_table_csv(const AblationResult& result,
                               const Metadata& meta);
std::string ablation_trials_csv(const AblationResult& result,
                                const Metadata& meta);
// Per-step ML trace/entropy and waypoint paths (world and pixel coordinates).
std::string ablation_plot_csv(const AblationResult& result,
                              const Metadata& meta);
std::string trace_plot_csv(const Trajectory& traj, const CameraSchedule& cams,
                           const BeliefTrace& trace, const Metadata& meta);

// %.17g
std::string format_double(double v);

// Reads a whole file; throws Error(kConfig) naming the path on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace uatraj

#endif  // UATRAJ_IO_HPP_
