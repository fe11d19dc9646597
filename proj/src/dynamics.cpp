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

#include "minmpc/dynamics.hpp"

#include <cmath>
#include <string>

#include "minmpc/errors.hpp"

namespace minmpc {

Vec DecisionVec::stacked() const {
  Vec w(size());
  w.head(continuous.size()) = continuous;
  w.tail(discrete.size()) = discrete;
  return w;
}

DecisionVec DecisionVec::from_stacked(const Vec& w, int n_u, bool relaxed_flag) {
  if (w.size() < n_u) throw DimensionError("DecisionVec::from_stacked: stacked vector too short");
  DecisionVec d;
  d.continuous = w.head(n_u);
  d.discrete = w.tail(w.size() - n_u);
  d.relaxed = relaxed_flag;
  return d;
}

void DecisionVec::validate() const {
  for (int i = 0; i < discrete.size(); ++i) {
    const double z = discrete(i);
    if (relaxed) {
      if (!(z >= 0.0 && z <= 1.0))
        throw Error("DecisionVec: relaxed discrete entry " + std::to_string(i) + " outside [0,1]");
    } else {
      if (z != 0.0 && z != 1.0)
        throw Error("DecisionVec: discrete entry " + std::to_string(i) + " not in {0,1}");
    }
  }
}

void SystemParams::validate() const {
  if (!(ts > 0.0)) throw Error("SystemParams: ts must be > 0");
  if (!(c1 > 0.0)) throw Error("SystemParams: c1 must be > 0");
  if (!(c2 > 0.0)) throw Error("SystemParams: c2 must be > 0");
  if (!(r_u >= 0.0)) throw Error("SystemParams: r_u must be >= 0");
  if (Q.rows() != Q.cols() || Q_N.rows() != Q_N.cols() || Q.rows() != x_ref.size() ||
      Q_N.rows() != x_ref.size())
    throw DimensionError("SystemParams: Q/Q_N/x_ref dimensions disagree");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 0.0 ||
      (Q_N - Q_N.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw Error("SystemParams: Q and Q_N must be symmetric");
  if (min_eigenvalue(Q) < -1e-12 || min_eigenvalue(Q_N) < -1e-12)
    throw Error("SystemParams: Q and Q_N must be positive semidefinite");
}

Vec lv_rhs(const StateVec& x, const DecisionVec& w, const SystemParams& params) {
  if (x.size() != 2) throw DimensionError("lv_rhs: state must have length 2");
  if (w.size() != 1) throw DimensionError("lv_rhs: expected a single decision entry");
  const double u = w.stacked()(0);
  Vec dx(2);
  dx(0) = x(0) - x(0) * x(1) - params.c1 * x(0) * u;
  dx(1) = -x(1) + x(0) * x(1) - params.c2 * x(1) * u;
  return dx;
}

DiscreteModel DiscreteModel::lotka_volterra(SystemParams params) {
  DiscreteModel m;
  m.params = std::move(params);
  m.n_x = 2;
  m.n_u = 0;
  m.n_z = 1;
  m.rhs = [](const Vec& x, const Vec& w, const SystemParams& p) {
    const double u = w(0);
    Vec dx(2);
    dx(0) = x(0) - x(0) * x(1) - p.c1 * x(0) * u;
    dx(1) = -x(1) + x(0) * x(1) - p.c2 * x(1) * u;
    return dx;
  };
  m.rhs_jac_x = [](const Vec& x, const Vec& w, const SystemParams& p) {
    const double u = w(0);
    Mat j(2, 2);
    j(0, 0) = 1.0 - x(1) - p.c1 * u;
    j(0, 1) = -x(0);
    j(1, 0) = x(1);
    j(1, 1) = -1.0 + x(0) - p.c2 * u;
    return j;
  };
  m.rhs_jac_w = [](const Vec& x, const Vec&, const SystemParams& p) {
    Mat j(2, 1);
    j(0, 0) = -p.c1 * x(0);
    j(1, 0) = -p.c2 * x(1);
    return j;
  };
  return m;
}

namespace {

void check_dims(const StateVec& x, const Vec& w, const DiscreteModel& model, const char* who) {
  if (x.size() != model.n_x) throw DimensionError(std::string(who) + ": state length mismatch");
  if (w.size() != model.n_w())
    throw DimensionError(std::string(who) + ": decision length mismatch");
}

void check_stage(const Vec& k, int stage) {
  if (!k.allFinite())
    throw IntegrationError("rk4_step: non-finite RK stage " + std::to_string(stage), stage);
}

}  // namespace

StateVec rk4_step_stacked(const StateVec& x, const Vec& w, const DiscreteModel& model) {
  check_dims(x, w, model, "rk4_step");
  const SystemParams& p = model.params;
  const double h = p.ts;

  const Vec k1 = model.rhs(x, w, p);
  check_stage(k1, 1);
  const Vec k2 = model.rhs(x + 0.5 * h * k1, w, p);
  check_stage(k2, 2);
  const Vec k3 = model.rhs(x + 0.5 * h * k2, w, p);
  check_stage(k3, 3);
  const Vec k4 = model.rhs(x + h * k3, w, p);
  check_stage(k4, 4);

  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

StateVec rk4_step(const StateVec& x, const DecisionVec& w, const DiscreteModel& model) {
  return rk4_step_stacked(x, w.stacked(), model);
}

StepJacobians step_jacobians_stacked(const StateVec& x, const Vec& w, const DiscreteModel& model) {
  check_dims(x, w, model, "step_jacobians");
  const SystemParams& p = model.params;
  const double h = p.ts;
  const int n = model.n_x;
  const Mat eye = Mat::Identity(n, n);

  const Vec k1 = model.rhs(x, w, p);
  check_stage(k1, 1);
  const Vec x2 = x + 0.5 * h * k1;
  const Vec k2 = model.rhs(x2, w, p);
  check_stage(k2, 2);
  const Vec x3 = x + 0.5 * h * k2;
  const Vec k3 = model.rhs(x3, w, p);
  check_stage(k3, 3);
  const Vec x4 = x + h * k3;

  // Stage sensitivities, chained: K_i = dk_i/dx and L_i = dk_i/dw.
  const Mat j1x = model.rhs_jac_x(x, w, p);
  const Mat j2x = model.rhs_jac_x(x2, w, p);
  const Mat j3x = model.rhs_jac_x(x3, w, p);
  const Mat j4x = model.rhs_jac_x(x4, w, p);

  const Mat k1x = j1x;
  const Mat k2x = j2x * (eye + 0.5 * h * k1x);
  const Mat k3x = j3x * (eye + 0.5 * h * k2x);
  const Mat k4x = j4x * (eye + h * k3x);

  const Mat j1w = model.rhs_jac_w(x, w, p);
  const Mat j2w = model.rhs_jac_w(x2, w, p);
  const Mat j3w = model.rhs_jac_w(x3, w, p);
  const Mat j4w = model.rhs_jac_w(x4, w, p);

  const Mat k1w = j1w;
  const Mat k2w = j2x * (0.5 * h * k1w) + j2w;
  const Mat k3w = j3x * (0.5 * h * k2w) + j3w;
  const Mat k4w = j4x * (h * k3w) + j4w;

  StepJacobians out;
  out.wrt_state = eye + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  out.wrt_decision = (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
  return out;
}

StepJacobians step_jacobians(const StateVec& x, const DecisionVec& w, const DiscreteModel& model) {
  return step_jacobians_stacked(x, w.stacked(), model);
}

std::vector<StateVec> rollout(const StateVec& x0, const std::vector<DecisionVec>& decisions,
                              const DiscreteModel& model) {
  if (decisions.empty()) throw Error("rollout: decision sequence is empty");
  std::vector<StateVec> states;
  states.reserve(decisions.size());
  StateVec x = x0;
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    try {
      x = rk4_step(x, decisions[k], model);
    } catch (const IntegrationError& e) {
      throw IntegrationError("rollout step " + std::to_string(k) + ": " + e.what(), e.stage);
    }
    states.push_back(x);
  }
  return states;
}

double stage_cost(const StateVec& x, const Vec& w_stacked, const SystemParams& params) {
  const Vec dx = x - params.x_ref;
  return dx.dot(params.Q * dx) + params.r_u * w_stacked.sum();
}

Vec stage_cost_grad_x(const StateVec& x, const SystemParams& params) {
  return 2.0 * (params.Q * (x - params.x_ref));
}

Vec stage_cost_grad_w(int n_w, const SystemParams& params) {
  return Vec::Constant(n_w, params.r_u);
}

double terminal_cost(const StateVec& x, const SystemParams& params) {
  const Vec dx = x - params.x_ref;
  return dx.dot(params.Q_N * dx);
}

Vec terminal_cost_grad(const StateVec& x, const SystemParams& params) {
  return 2.0 * (params.Q_N * (x - params.x_ref));
}

double positivity_penalty(const StateVec& x, double lower_bound) {
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double v = std::max(0.0, lower_bound - x(i));
    sum += v * v;
  }
  return sum;
}

Vec positivity_penalty_grad(const StateVec& x, double lower_bound) {
  Vec g = Vec::Zero(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double v = std::max(0.0, lower_bound - x(i));
    g(i) = -2.0 * v;
  }
  return g;
}

}  // namespace minmpc
