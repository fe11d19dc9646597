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

#include "minmpc/expert.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "minmpc/errors.hpp"

namespace minmpc {

namespace {

constexpr double kPruneSlack = 1e-9;
constexpr double kHardFeasTol = -1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Fixing> effective_fixings(const HorizonProblem& p) {
  if (p.integrality.empty()) return std::vector<Fixing>(p.N, Fixing::Free);
  return p.integrality;
}

// Per-entry box from the fixings: continuous entries keep [0,1]; discrete
// entries collapse to a point when the step is fixed.
void fill_bounds(const HorizonProblem& p, const std::vector<Fixing>& fix, Vec& lb, Vec& ub) {
  const int n_w = p.model.n_w();
  lb = Vec::Zero(p.N * n_w);
  ub = Vec::Ones(p.N * n_w);
  for (int k = 0; k < p.N; ++k) {
    for (int j = p.model.n_u; j < n_w; ++j) {
      const int idx = k * n_w + j;
      if (fix[k] == Fixing::Zero) ub(idx) = 0.0;
      if (fix[k] == Fixing::One) lb(idx) = 1.0;
    }
  }
}

std::vector<DecisionVec> unstack_sequence(const HorizonProblem& p, const Vec& w_all,
                                          bool relaxed) {
  const int n_w = p.model.n_w();
  std::vector<DecisionVec> out;
  out.reserve(p.N);
  for (int k = 0; k < p.N; ++k)
    out.push_back(DecisionVec::from_stacked(w_all.segment(k * n_w, n_w), p.model.n_u, relaxed));
  return out;
}

Vec stack_sequence(const HorizonProblem& p, const std::vector<DecisionVec>& decisions) {
  const int n_w = p.model.n_w();
  Vec w_all(p.N * n_w);
  for (int k = 0; k < p.N; ++k) w_all.segment(k * n_w, n_w) = decisions[k].stacked();
  return w_all;
}

// Rounds free discrete entries to the nearest integer, ties toward 0.
Vec round_decisions(const HorizonProblem& p, const std::vector<Fixing>& fix, const Vec& w_all) {
  const int n_w = p.model.n_w();
  Vec r = w_all;
  for (int k = 0; k < p.N; ++k) {
    for (int j = p.model.n_u; j < n_w; ++j) {
      const int idx = k * n_w + j;
      if (fix[k] == Fixing::Zero) r(idx) = 0.0;
      else if (fix[k] == Fixing::One) r(idx) = 1.0;
      else r(idx) = (w_all(idx) > 0.5) ? 1.0 : 0.0;
    }
  }
  return r;
}

bool rollout_feasible(const HorizonProblem& p, const Vec& w_all) {
  const int n_w = p.model.n_w();
  StateVec x = p.x0;
  for (int k = 0; k < p.N; ++k) {
    x = rk4_step_stacked(x, w_all.segment(k * n_w, n_w), p.model);
    if (x.minCoeff() < kHardFeasTol) return false;
  }
  return true;
}

struct Node {
  std::vector<Fixing> fix;
  Vec relax_w;
  double bound = 0.0;
  std::uint64_t seq = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

}  // namespace

void HorizonProblem::validate() const {
  if (N < 1) throw Error("HorizonProblem: N must be >= 1");
  if (!x0.allFinite()) throw Error("HorizonProblem: x0 must be finite");
  if (!integrality.empty() && static_cast<int>(integrality.size()) != N)
    throw DimensionError("HorizonProblem: integrality length must be 0 or N");
  model.params.validate();
}

double eval_horizon_cost_stacked(const HorizonProblem& problem, const Vec& w_all) {
  const int n_w = problem.model.n_w();
  if (w_all.size() != problem.N * n_w)
    throw DimensionError("eval_horizon_cost: decision vector length mismatch");
  const SystemParams& p = problem.model.params;
  double cost = 0.0;
  StateVec x = problem.x0;
  for (int k = 0; k < problem.N; ++k) {
    const Vec w = w_all.segment(k * n_w, n_w);
    cost += stage_cost(x, w, p);
    x = rk4_step_stacked(x, w, problem.model);
    cost += problem.penalty_weight * positivity_penalty(x, problem.state_lb);
  }
  cost += terminal_cost(x, p);
  return cost;
}

double eval_horizon_cost(const HorizonProblem& problem,
                         const std::vector<DecisionVec>& decisions) {
  if (static_cast<int>(decisions.size()) != problem.N)
    throw DimensionError("eval_horizon_cost: expected N decisions");
  return eval_horizon_cost_stacked(problem, stack_sequence(problem, decisions));
}

Vec objective_gradient_stacked(const HorizonProblem& problem, const Vec& w_all) {
  const int n_w = problem.model.n_w();
  if (w_all.size() != problem.N * n_w)
    throw DimensionError("objective_gradient: decision vector length mismatch");
  const SystemParams& p = problem.model.params;

  std::vector<StateVec> states(problem.N + 1);
  std::vector<StepJacobians> jacs(problem.N);
  states[0] = problem.x0;
  for (int k = 0; k < problem.N; ++k) {
    const Vec w = w_all.segment(k * n_w, n_w);
    jacs[k] = step_jacobians_stacked(states[k], w, problem.model);
    states[k + 1] = rk4_step_stacked(states[k], w, problem.model);
  }

  Vec grad(problem.N * n_w);
  Vec mu = terminal_cost_grad(states[problem.N], p) +
           problem.penalty_weight * positivity_penalty_grad(states[problem.N], problem.state_lb);
  for (int k = problem.N - 1; k >= 0; --k) {
    grad.segment(k * n_w, n_w) =
        stage_cost_grad_w(n_w, p) + jacs[k].wrt_decision.transpose() * mu;
    if (k >= 1) {
      mu = stage_cost_grad_x(states[k], p) + jacs[k].wrt_state.transpose() * mu +
           problem.penalty_weight * positivity_penalty_grad(states[k], problem.state_lb);
    }
  }
  return grad;
}

Vec objective_gradient(const HorizonProblem& problem,
                       const std::vector<DecisionVec>& decisions) {
  if (static_cast<int>(decisions.size()) != problem.N)
    throw DimensionError("objective_gradient: expected N decisions");
  return objective_gradient_stacked(problem, stack_sequence(problem, decisions));
}

RelaxedSolution solve_relaxation(const HorizonProblem& problem, const Vec* warm_start) {
  const int n_w = problem.model.n_w();
  const std::vector<Fixing> fix = effective_fixings(problem);
  Vec lb, ub;
  fill_bounds(problem, fix, lb, ub);

  Vec x0 = 0.5 * (lb + ub);
  if (warm_start != nullptr) {
    if (warm_start->size() != problem.N * n_w)
      throw DimensionError("solve_relaxation: warm start length mismatch");
    x0 = *warm_start;
  }

  auto objective = [&problem](const Vec& w) {
    try {
      return eval_horizon_cost_stacked(problem, w);
    } catch (const IntegrationError&) {
      return kInf;
    }
  };
  auto gradient = [&problem, n_w](const Vec& w) {
    try {
      return objective_gradient_stacked(problem, w);
    } catch (const IntegrationError&) {
      return Vec(Vec::Zero(problem.N * n_w));
    }
  };

  RelaxedSolution out;
  try {
    const PgResult res = box_projected_gradient(objective, gradient, x0, lb, ub);
    out.decisions = unstack_sequence(problem, res.x, true);
    out.objective = res.objective;
    out.kkt_norm = res.kkt_norm;
    out.iterations = res.iterations;
  } catch (const RelaxationError&) {
    out.decisions = unstack_sequence(problem, x0.cwiseMax(lb).cwiseMin(ub), true);
    out.objective = kInf;
    out.kkt_norm = kInf;
    out.iterations = 0;
  }
  return out;
}

ExpertSolution branch_and_bound(const HorizonProblem& problem, BnbTrace* trace) {
  problem.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int n_w = problem.model.n_w();

  ExpertSolution sol;
  double best_cost = kInf;
  Vec best_w;

  auto try_incumbent = [&](const Vec& w_int) {
    double cost;
    try {
      cost = eval_horizon_cost_stacked(problem, w_int);
    } catch (const IntegrationError&) {
      return;
    }
    if (!std::isfinite(cost) || cost >= best_cost) return;
    if (!rollout_feasible(problem, w_int)) return;
    best_cost = cost;
    best_w = w_int;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::uint64_t next_seq = 0;

  auto make_node = [&](std::vector<Fixing> fix, const Vec* warm) {
    HorizonProblem sub = problem;
    sub.integrality = fix;
    const RelaxedSolution rel = solve_relaxation(sub, warm);
    ++sol.node_count;

    Node node;
    node.fix = std::move(fix);
    node.relax_w = stack_sequence(problem, rel.decisions);
    node.bound = rel.objective;
    node.seq = next_seq++;
    if (trace != nullptr) trace->bounds.push_back(node.bound);

    bool all_fixed = true;
    for (const Fixing f : node.fix)
      if (f == Fixing::Free) all_fixed = false;
    if (std::isfinite(node.bound)) {
      try_incumbent(round_decisions(problem, node.fix, node.relax_w));
    }
    if (trace != nullptr) trace->incumbents.push_back(best_cost);
    if (!all_fixed && node.bound < best_cost - kPruneSlack) open.push(std::move(node));
  };

  make_node(effective_fixings(problem), nullptr);

  sol.status = SolveStatus::Optimal;
  while (!open.empty()) {
    if (sol.node_count >= problem.node_budget) {
      sol.status = SolveStatus::NodeLimit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= best_cost - kPruneSlack) continue;

    // Branch on the free step whose relaxed value is closest to 0.5.
    int branch_k = -1;
    double best_frac = kInf;
    for (int k = 0; k < problem.N; ++k) {
      if (node.fix[k] != Fixing::Free) continue;
      double frac = 0.0;
      for (int j = problem.model.n_u; j < n_w; ++j)
        frac = std::max(frac, std::abs(node.relax_w(k * n_w + j) - 0.5));
      if (frac < best_frac) {
        best_frac = frac;
        branch_k = k;
      }
    }
    if (branch_k < 0) continue;

    for (const Fixing child_fix : {Fixing::Zero, Fixing::One}) {
      std::vector<Fixing> fix = node.fix;
      fix[branch_k] = child_fix;
      Vec warm = node.relax_w;
      for (int j = problem.model.n_u; j < n_w; ++j)
        warm(branch_k * n_w + j) = (child_fix == Fixing::One) ? 1.0 : 0.0;
      make_node(std::move(fix), &warm);
    }
  }

  if (!std::isfinite(best_cost)) {
    sol.status = (sol.status == SolveStatus::NodeLimit) ? SolveStatus::NodeLimit
                                                        : SolveStatus::Infeasible;
    sol.objective = kInf;
  } else {
    sol.decisions = unstack_sequence(problem, best_w, false);
    sol.objective = best_cost;
  }
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return sol;
}

ExpertStep expert_policy_step(const DiscreteModel& model, int N, const StateVec& x) {
  if (!x.allFinite()) throw Error("expert_policy_step: state must be finite");
  HorizonProblem problem;
  problem.model = model;
  problem.N = N;
  problem.x0 = x;

  const ExpertSolution sol = branch_and_bound(problem);
  if (sol.status == SolveStatus::Infeasible || sol.decisions.empty())
    throw SolverError("expert_policy_step: no feasible decision sequence found");

  ExpertStep step;
  step.decision = sol.decisions.front();
  step.wall_time = sol.wall_time;
  step.status = sol.status;
  return step;
}

}  // namespace minmpc
