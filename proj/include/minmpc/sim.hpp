/*
 * Copyright 2026 The minmpc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MINMPC_SIM_HPP
#define MINMPC_SIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "minmpc/dynamics.hpp"
#include "minmpc/ioc.hpp"
#include "minmpc/myopic.hpp"

namespace minmpc {

enum class ControllerKind { Expert, Myopic };

struct SimConfig {
  int steps = 40;
  StateVec x0;
  ControllerKind controller = ControllerKind::Expert;
  int expert_N = 20;
  CostToGo value;  // myopic controller only
  SystemParams nominal;
  double mismatch_c1 = 1.10;  // plant-side multiplier on c1
  double mismatch_c2 = 1.10;
  double noise_std = 0.01;
  std::uint64_t seed = 0;
  double state_lb = 0.0;
  double penalty_weight = 1e4;
  int node_budget = 200000;
};

struct TrajectoryRow {
  int k = 0;
  StateVec x_true;
  StateVec x_meas;
  DecisionVec decision;
  double stage_cost = 0.0;
  double wall_time = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  double total_cost = 0.0;
  double max_wall_time = 0.0;
  double mean_wall_time = 0.0;
  bool aborted = false;
  int error_row = -1;
  std::string error;
};

// Measurement noise is Gaussian with one RNG substream per state entry, so the
// realization depends only on (seed, step, entry), never on the controller.
TrajectoryLog simulate(const SimConfig& config);

DemoDataset demo_generate(const DiscreteModel& model, int N,
                          const std::vector<StateVec>& initial_states, int steps_per_traj,
                          double state_lb = 0.0, double penalty_weight = 1e4,
                          int node_budget = 200000);

double closed_loop_cost(const TrajectoryLog& log);

}  // namespace minmpc

#endif  // MINMPC_SIM_HPP
