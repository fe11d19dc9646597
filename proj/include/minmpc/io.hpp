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

#ifndef MINMPC_IO_HPP
#define MINMPC_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "minmpc/dynamics.hpp"
#include "minmpc/ioc.hpp"
#include "minmpc/sim.hpp"

namespace minmpc {

// Flat key=value configuration for the whole pipeline. mismatch_factor is
// accepted on parse as a shorthand that sets both per-coefficient multipliers.
struct PipelineConfig {
  SystemParams params;
  int expert_N = 20;
  double state_lb = 0.0;
  double penalty_weight = 1e4;
  int bb_node_budget = 200000;
  StateVec value_center;  // defaults to params.x_ref
  int steps = 40;
  StateVec x0;
  double mismatch_c1 = 1.10;
  double mismatch_c2 = 1.10;
  double noise_std = 0.01;
  std::uint64_t seed = 0;
  std::vector<StateVec> demo_x0;
  int demo_steps = 40;
  double admm_rho = 1.0;
  double admm_tol = 1e-9;
  int admm_max_iter = 20000;
};

PipelineConfig default_config();
PipelineConfig parse_config(const std::string& text);
std::string serialize_config(const PipelineConfig& config);

// Empty path yields the defaults.
PipelineConfig load_config_file(const std::string& path);

std::string format_double(double v);  // 17 significant digits

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

void write_demo_csv(const std::string& path, const DemoDataset& dataset);
DemoDataset read_demo_csv(const std::string& path);

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);
TrajectoryLog read_trajectory_csv(const std::string& path);

void write_impute_report(const std::string& path, const ImputedValue& value,
                         const std::string& config_echo);
ImputedValue read_impute_report(const std::string& path);

struct CompareReport {
  double cost_a = 0.0;
  double cost_b = 0.0;
  double cost_difference = 0.0;
  double cost_ratio = 1.0;
  double max_wall_a = 0.0;
  double max_wall_b = 0.0;
  double max_wall_ratio = 1.0;
  double mean_wall_a = 0.0;
  double mean_wall_b = 0.0;
  double mean_wall_ratio = 1.0;
};

CompareReport make_compare_report(const TrajectoryLog& a, const TrajectoryLog& b);
void write_compare_report(const std::string& path, const CompareReport& report,
                          const std::string& a_path, const std::string& b_path,
                          const std::string& config_echo);

}  // namespace minmpc

#endif  // MINMPC_IO_HPP
