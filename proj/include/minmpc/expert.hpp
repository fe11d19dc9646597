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

#ifndef MINMPC_EXPERT_HPP
#define MINMPC_EXPERT_HPP

#include <cstdint>
#include <vector>

#include "minmpc/dynamics.hpp"
#include "minmpc/pg.hpp"

namespace minmpc {

enum class Fixing { Free, Zero, One };

enum class SolveStatus { Optimal, Infeasible, NodeLimit };

// Full-horizon problem: minimize sum of stage costs plus terminal cost over
// binary decision sequences, with a soft quadratic penalty keeping predicted
// states above state_lb.
struct HorizonProblem {
  DiscreteModel model;
  int N = 1;
  StateVec x0;
  std::vector<Fixing> integrality;  // empty means all Free; else length N
  double state_lb = 0.0;
  double penalty_weight = 1e4;
  int node_budget = 200000;

  void validate() const;
};

struct ExpertSolution {
  std::vector<DecisionVec> decisions;
  double objective = 0.0;
  int node_count = 0;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

struct RelaxedSolution {
  std::vector<DecisionVec> decisions;
  double objective = 0.0;
  double kkt_norm = 0.0;
  int iterations = 0;
};

// Per-node record for inspecting the search: relaxation bound at creation and
// the incumbent value after the node was processed.
struct BnbTrace {
  std::vector<double> bounds;
  std::vector<double> incumbents;
};

struct ExpertStep {
  DecisionVec decision;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

double eval_horizon_cost(const HorizonProblem& problem,
                         const std::vector<DecisionVec>& decisions);
double eval_horizon_cost_stacked(const HorizonProblem& problem, const Vec& w_all);

// Exact gradient of eval_horizon_cost in all decision entries: one forward
// rollout, one backward adjoint sweep through the step Jacobians.
Vec objective_gradient(const HorizonProblem& problem,
                       const std::vector<DecisionVec>& decisions);
Vec objective_gradient_stacked(const HorizonProblem& problem, const Vec& w_all);

RelaxedSolution solve_relaxation(const HorizonProblem& problem,
                                 const Vec* warm_start = nullptr);

ExpertSolution branch_and_bound(const HorizonProblem& problem,
                                BnbTrace* trace = nullptr);

ExpertStep expert_policy_step(const DiscreteModel& model, int N, const StateVec& x);

}  // namespace minmpc

#endif  // MINMPC_EXPERT_HPP
