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

#ifndef MINMPC_DYNAMICS_HPP
#define MINMPC_DYNAMICS_HPP

#include <functional>
#include <vector>

#include "minmpc/linalg.hpp"

namespace minmpc {

// System state. The fishing benchmark uses n_x = 2 (prey, predator).
using StateVec = Vec;

// Stacked decision w = [u; z]: continuous controls first, then discrete
// controls. Discrete entries are binary {0, 1}; when `relaxed` is set they
// may take any value in [0, 1].
struct DecisionVec {
  Vec continuous;  // length n_u
  Vec discrete;    // length n_z
  bool relaxed = false;

  int size() const { return static_cast<int>(continuous.size() + discrete.size()); }
  Vec stacked() const;
  static DecisionVec from_stacked(const Vec& w, int n_u, bool relaxed_flag);

  // Throws unless every entry is consistent with the relaxed flag.
  void validate() const;
};

// Tracking-cost parameters and the benchmark coefficients.
//   stage cost     l(x, w) = (x - x_ref)' Q (x - x_ref) + r_u * sum(w)
//   terminal cost  l_N(x)  = (x - x_ref)' Q_N (x - x_ref)
struct SystemParams {
  double c1 = 0.4;  // fishing coefficient on prey
  double c2 = 0.2;  // fishing coefficient on predator
  double ts = 0.1;  // sampling interval
  Vec x_ref = (Vec(2) << 1.0, 1.0).finished();
  Mat Q = Mat::Identity(2, 2);
  double r_u = 0.0;
  Mat Q_N = Mat::Identity(2, 2);

  void validate() const;  // throws Error on a violated invariant
};

// Discrete-time model: one RK4 step of `rhs` with the decision held
// constant over the interval. Keeps the vector field and its Jacobians as
// handles so a second system can plug in without touching the pipeline.
struct DiscreteModel {
  SystemParams params;
  int n_x = 2;
  int n_u = 0;
  int n_z = 1;

  // rhs(x, w_stacked, params) -> dx/dt, plus exact Jacobians d(rhs)/dx and
  // d(rhs)/dw used for the discrete-step sensitivities.
  std::function<Vec(const Vec&, const Vec&, const SystemParams&)> rhs;
  std::function<Mat(const Vec&, const Vec&, const SystemParams&)> rhs_jac_x;
  std::function<Mat(const Vec&, const Vec&, const SystemParams&)> rhs_jac_w;

  int n_w() const { return n_u + n_z; }
  static DiscreteModel lotka_volterra(SystemParams params = {});
};

// Lotka-Volterra fishing vector field:
//   dx1/dt =  x1 - x1*x2 - c1*x1*u
//   dx2/dt = -x2 + x1*x2 - c2*x2*u
Vec lv_rhs(const StateVec& x, const DecisionVec& w, const SystemParams& params);

// One classical RK4 step of length params.ts with w held constant.
StateVec rk4_step(const StateVec& x, const DecisionVec& w, const DiscreteModel& model);
StateVec rk4_step_stacked(const StateVec& x, const Vec& w_stacked, const DiscreteModel& model);

struct StepJacobians {
  Mat wrt_state;     // n_x x n_x
  Mat wrt_decision;  // n_x x n_w
};

// Exact Jacobians of the RK4 map, obtained by differentiating the four
// stages and chaining them through the combination step.
StepJacobians step_jacobians(const StateVec& x, const DecisionVec& w, const DiscreteModel& model);
StepJacobians step_jacobians_stacked(const StateVec& x, const Vec& w_stacked,
                                     const DiscreteModel& model);

// Iterated rk4_step; returns x_1..x_N for N input decisions.
std::vector<StateVec> rollout(const StateVec& x0, const std::vector<DecisionVec>& decisions,
                              const DiscreteModel& model);

// Cost pieces shared by the expert and myopic controllers.
double stage_cost(const StateVec& x, const Vec& w_stacked, const SystemParams& params);
Vec stage_cost_grad_x(const StateVec& x, const SystemParams& params);
Vec stage_cost_grad_w(int n_w, const SystemParams& params);
double terminal_cost(const StateVec& x, const SystemParams& params);
Vec terminal_cost_grad(const StateVec& x, const SystemParams& params);

// Soft lower-bound penalty sum(max(0, lb - x_e)^2) and its gradient.
double positivity_penalty(const StateVec& x, double lower_bound);
Vec positivity_penalty_grad(const StateVec& x, double lower_bound);

}  // namespace minmpc

#endif  // MINMPC_DYNAMICS_HPP
