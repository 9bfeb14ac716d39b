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
#ifndef UATRAJ_UATRAJ_HPP_
#define UATRAJ_UATRAJ_HPP_

#include "uatraj/belief.hpp"
#include "uatraj/errors.hpp"
#include "uatraj/geometry.hpp"
#include "uatraj/io.hpp"
#include "uatraj/lbfgs.hpp"
#include "uatraj/noise_models.hpp"
#include "uatraj/optimizer.hpp"
#include "uatraj/sim_harness.hpp"
#include "uatraj/trajectory.hpp"

#endif  // UATRAJ_UATRAJ_HPP_
