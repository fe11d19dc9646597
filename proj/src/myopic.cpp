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

#include "minmpc/myopic.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "minmpc/errors.hpp"
#include "minmpc/linalg.hpp"
#include "minmpc/pg.hpp"

namespace minmpc {

namespace {

constexpr double kHardFeasTol = -1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void CostToGo::validate() const {
  if (P.rows() != P.cols() || P.rows() != center.size())
    throw DimensionError("CostToGo: P and center dimensions disagree");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error("CostToGo: P must be symmetric");
  if (min_eigenvalue(P) < -1e-10) throw Error("CostToGo: P must be positive semidefinite");
}

double value_eval(const CostToGo& v, const StateVec& x) {
  if (x.size() != v.center.size()) throw DimensionError("value_eval: dimension mismatch");
  const Vec d = x - v.center;
  return d.dot(v.P * d);
}

double evaluate_candidate(const StateVec& x, const DecisionVec& w, const DiscreteModel& model,
                          const CostToGo& v, const MyopicSettings& settings) {
  const Vec ws = w.stacked();
  const StateVec f = rk4_step_stacked(x, ws, model);
  return stage_cost(x, ws, model.params) +
         settings.penalty_weight * positivity_penalty(f, settings.state_lb) + value_eval(v, f);
}

MyopicDecision myopic_policy_step(const StateVec& x, const DiscreteModel& model,
                                  const CostToGo& v, const MyopicSettings& settings) {
  if (!x.allFinite()) throw ControllerError("myopic_policy_step: state must be finite");
  const auto t_start = std::chrono::steady_clock::now();

  const int n_z = model.n_z;
  const int n_candidates = 1 << n_z;
  MyopicDecision out;
  out.candidate_costs.assign(n_candidates, kInf);

  int best_c = -1;
  double best_cost = kInf;
  DecisionVec best_w;

  for (int c = 0; c < n_candidates; ++c) {
    DecisionVec w;
    w.continuous = Vec::Zero(model.n_u);
    w.discrete = Vec::Zero(n_z);
    // Entry 0 is the most significant bit so candidate index order is
    // lexicographic order on the discrete vector.
    for (int j = 0; j < n_z; ++j) w.discrete(j) = (c >> (n_z - 1 - j)) & 1;
    w.relaxed = false;

    double cost;
    bool feasible;
    try {
      if (model.n_u > 0) {
        auto objective = [&](const Vec& u) {
          DecisionVec cand = w;
          cand.continuous = u;
          return evaluate_candidate(x, cand, model, v, settings);
        };
        auto gradient = [&](const Vec& u) {
          // Central differences; the continuous hook is outside the benchmark
          // hot path.
          const double h = 1e-7;
          Vec g(u.size());
          for (int i = 0; i < u.size(); ++i) {
            Vec up = u, dn = u;
            up(i) += h;
            dn(i) -= h;
            g(i) = (objective(up) - objective(dn)) / (2.0 * h);
          }
          return g;
        };
        const PgResult res = box_projected_gradient(objective, gradient, w.continuous,
                                                    Vec::Zero(model.n_u), Vec::Ones(model.n_u));
        w.continuous = res.x;
        cost = res.objective;
      } else {
        cost = evaluate_candidate(x, w, model, v, settings);
      }
      feasible = rk4_step_stacked(x, w.stacked(), model).minCoeff() >= kHardFeasTol;
    } catch (const IntegrationError&) {
      cost = kInf;
      feasible = false;
    } catch (const RelaxationError&) {
      cost = kInf;
      feasible = false;
    }

    out.candidate_costs[c] = cost;
    if (feasible && cost < best_cost) {
      best_cost = cost;
      best_c = c;
      best_w = w;
    }
  }

  if (best_c < 0) {
    std::string diag = "myopic_policy_step: all candidates infeasible; costs:";
    for (const double c : out.candidate_costs) diag += " " + std::to_string(c);
    throw ControllerError(diag);
  }

  out.decision = best_w;
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace minmpc
