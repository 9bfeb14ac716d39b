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
#ifndef UATRAJ_TRAJECTORY_HPP_
#define UATRAJ_TRAJECTORY_HPP_

#include <vector>

#include "uatraj/geometry.hpp"

namespace uatraj {

// Waypoints x_0 .. x_T. The first is the start pose and the last is the goal;
// horizon T = waypoints.size() - 1.
struct Trajectory {
  std::vector<Pose> waypoints;

  int horizon() const { return static_cast<int>(waypoints.size()) - 1; }
  const Pose& start() const { return waypoints.front(); }
  const Pose& goal() const { return waypoints.back(); }

  // Throws Error(kInvalidArgument) if T < 1 or any waypoint is non-finite.
  void validate() const;

  // Sum of positional segment lengths.
  double path_length() const;
};

}  // namespace uatraj

#endif  // UATRAJ_TRAJECTORY_HPP_
