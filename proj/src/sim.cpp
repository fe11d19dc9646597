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

#include "minmpc/sim.hpp"

#include <chrono>
#include <string>

#include "minmpc/errors.hpp"
#include "minmpc/expert.hpp"
#include "minmpc/rng.hpp"

namespace minmpc {

TrajectoryLog simulate(const SimConfig& config) {
  if (config.steps < 0) throw Error("simulate: steps must be >= 0");
  if (config.noise_std < 0.0) throw Error("simulate: noise_std must be >= 0");
  if (config.mismatch_c1 <= 0.0 || config.mismatch_c2 <= 0.0)
    throw Error("simulate: mismatch factors must be > 0");
  config.nominal.validate();

  const DiscreteModel nominal = DiscreteModel::lotka_volterra(config.nominal);
  SystemParams plant_params = config.nominal;
  plant_params.c1 *= config.mismatch_c1;
  plant_params.c2 *= config.mismatch_c2;
  const DiscreteModel plant = DiscreteModel::lotka_volterra(plant_params);

  if (config.controller == ControllerKind::Myopic) config.value.validate();

  std::vector<Xoshiro256pp> noise_streams;
  for (int e = 0; e < nominal.n_x; ++e)
    noise_streams.emplace_back(config.seed, static_cast<std::uint64_t>(e));

  TrajectoryLog log;
  log.rows.reserve(config.steps);
  StateVec x = config.x0;
  for (int k = 0; k < config.steps; ++k) {
    StateVec y(nominal.n_x);
    for (int e = 0; e < nominal.n_x; ++e) {
      const double draw = noise_streams[e].normal();
      y(e) = x(e) + config.noise_std * draw;
      if (y(e) < 0.0) y(e) = 0.0;
    }

    TrajectoryRow row;
    row.k = k;
    row.x_true = x;
    row.x_meas = y;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (config.controller == ControllerKind::Expert) {
        HorizonProblem problem;
        problem.model = nominal;
        problem.N = config.expert_N;
        problem.x0 = y;
        problem.state_lb = config.state_lb;
        problem.penalty_weight = config.penalty_weight;
        problem.node_budget = config.node_budget;
        const ExpertSolution sol = branch_and_bound(problem);
        if (sol.status == SolveStatus::Infeasible || sol.decisions.empty())
          throw ControllerError("simulate: expert found no feasible sequence");
        row.decision = sol.decisions.front();
      } else {
        MyopicSettings settings;
        settings.state_lb = config.state_lb;
        settings.penalty_weight = config.penalty_weight;
        row.decision = myopic_policy_step(y, nominal, config.value, settings).decision;
      }
    } catch (const Error& e) {
      log.aborted = true;
      log.error_row = k;
      log.error = e.what();
      break;
    }
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    row.stage_cost = stage_cost(x, row.decision.stacked(), config.nominal);
    x = rk4_step(x, row.decision, plant);

    log.total_cost += row.stage_cost;
    log.max_wall_time = std::max(log.max_wall_time, row.wall_time);
    log.rows.push_back(std::move(row));
  }
  if (!log.rows.empty())
    log.mean_wall_time = [&] {
      double s = 0.0;
      for (const TrajectoryRow& r : log.rows) s += r.wall_time;
      return s / static_cast<double>(log.rows.size());
    }();
  return log;
}

DemoDataset demo_generate(const DiscreteModel& model, int N,
                          const std::vector<StateVec>& initial_states, int steps_per_traj,
                          double state_lb, double penalty_weight, int node_budget) {
  if (N < 1) throw Error("demo_generate: N must be >= 1");
  if (steps_per_traj < 1) throw Error("demo_generate: steps_per_traj must be >= 1");
  if (initial_states.empty()) throw Error("demo_generate: no initial states");

  DemoDataset dataset;
  dataset.records.reserve(initial_states.size() * static_cast<std::size_t>(steps_per_traj));
  for (std::size_t t = 0; t < initial_states.size(); ++t) {
    StateVec x = initial_states[t];
    for (int k = 0; k < steps_per_traj; ++k) {
      HorizonProblem problem;
      problem.model = model;
      problem.N = N;
      problem.x0 = x;
      problem.state_lb = state_lb;
      problem.penalty_weight = penalty_weight;
      problem.node_budget = node_budget;
      const ExpertSolution sol = branch_and_bound(problem);
      if (sol.status == SolveStatus::Infeasible || sol.decisions.empty())
        throw SolverError("demo_generate: expert found no feasible sequence");
      DemoRecord rec;
      rec.x = x;
      rec.w = sol.decisions.front();
      rec.traj_id = static_cast<int>(t);
      rec.step_index = k;
      rec.flagged = sol.status == SolveStatus::NodeLimit;
      x = rk4_step(x, rec.w, model);
      dataset.records.push_back(std::move(rec));
    }
  }
  return dataset;
}

double closed_loop_cost(const TrajectoryLog& log) {
  double sum = 0.0;
  for (const TrajectoryRow& r : log.rows) sum += r.stage_cost;
  return sum;
}

}  // namespace minmpc
