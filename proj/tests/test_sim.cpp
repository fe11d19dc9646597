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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"

#include "minmpc/errors.hpp"
#include "minmpc/expert.hpp"
#include "minmpc/sim.hpp"

using namespace minmpc;

namespace {

Vec state2(double a, double b) { return (Vec(2) << a, b).finished(); }

SimConfig ideal_expert_config(const StateVec& x0, int steps, int N) {
  SimConfig c;
  c.steps = steps;
  c.x0 = x0;
  c.controller = ControllerKind::Expert;
  c.expert_N = N;
  c.mismatch_c1 = 1.0;
  c.mismatch_c2 = 1.0;
  c.noise_std = 0.0;
  return c;
}

CostToGo small_value() {
  CostToGo v;
  v.P = (Mat(2, 2) << 2e-3, 1e-4, 1e-4, 5e-3).finished();
  v.center = state2(1.0, 1.0);
  return v;
}

bool logs_equal_modulo_time(const TrajectoryLog& a, const TrajectoryLog& b) {
  if (a.rows.size() != b.rows.size() || a.total_cost != b.total_cost ||
      a.aborted != b.aborted)
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].k != b.rows[i].k) return false;
    if (a.rows[i].x_true != b.rows[i].x_true) return false;
    if (a.rows[i].x_meas != b.rows[i].x_meas) return false;
    if (a.rows[i].decision.stacked() != b.rows[i].decision.stacked()) return false;
    if (a.rows[i].stage_cost != b.rows[i].stage_cost) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero steps produce an empty log") {
  SimConfig c = ideal_expert_config(state2(1.0, 1.0), 0, 4);
  const TrajectoryLog log = simulate(c);
  CHECK(log.rows.empty());
  CHECK(log.total_cost == 0.0);
  CHECK_FALSE(log.aborted);
  CHECK(closed_loop_cost(log) == 0.0);
}

TEST_CASE("row count and step indices match the requested horizon") {
  SimConfig c = ideal_expert_config(state2(1.1, 0.9), 7, 5);
  const TrajectoryLog log = simulate(c);
  REQUIRE(log.rows.size() == 7);
  for (int k = 0; k < 7; ++k) CHECK(log.rows[k].k == k);
}

TEST_CASE("noise-free matched-plant expert run reproduces the demonstration generator") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  const StateVec x0 = state2(0.5, 0.7);
  const int steps = 10, N = 8;

  const DemoDataset demo = demo_generate(model, N, {x0}, steps);
  SimConfig c = ideal_expert_config(x0, steps, N);
  const TrajectoryLog log = simulate(c);

  REQUIRE(log.rows.size() == static_cast<std::size_t>(demo.M()));
  for (int k = 0; k < steps; ++k) {
    CHECK(log.rows[k].x_true == demo.records[k].x);
    CHECK(log.rows[k].x_meas == demo.records[k].x);
    CHECK(log.rows[k].decision.stacked() == demo.records[k].w.stacked());
  }
}

TEST_CASE("the same seed reproduces the trajectory bit for bit") {
  SimConfig c;
  c.steps = 12;
  c.x0 = state2(1.3, 0.8);
  c.controller = ControllerKind::Myopic;
  c.value = small_value();
  c.noise_std = 0.02;
  c.seed = 1234;
  const TrajectoryLog a = simulate(c);
  const TrajectoryLog b = simulate(c);
  CHECK(logs_equal_modulo_time(a, b));
}

TEST_CASE("different seeds change the measurement stream") {
  SimConfig c;
  c.steps = 8;
  c.x0 = state2(1.3, 0.8);
  c.controller = ControllerKind::Myopic;
  c.value = small_value();
  c.noise_std = 0.02;
  c.seed = 1;
  const TrajectoryLog a = simulate(c);
  c.seed = 2;
  const TrajectoryLog b = simulate(c);
  CHECK(a.rows[0].x_meas != b.rows[0].x_meas);
}

TEST_CASE("noise realization per step depends on the seed, not the controller") {
  SimConfig c;
  c.steps = 15;
  c.x0 = state2(1.2, 0.9);
  c.noise_std = 0.03;
  c.seed = 77;
  c.controller = ControllerKind::Expert;
  c.expert_N = 6;
  const TrajectoryLog expert = simulate(c);
  c.controller = ControllerKind::Myopic;
  c.value = small_value();
  const TrajectoryLog myopic = simulate(c);

  REQUIRE(expert.rows.size() == 15);
  REQUIRE(myopic.rows.size() == 15);
  bool trajectories_differ = false;
  for (int k = 0; k < 15; ++k) {
    const Vec da = expert.rows[k].x_meas - expert.rows[k].x_true;
    const Vec db = myopic.rows[k].x_meas - myopic.rows[k].x_true;
    CHECK((da - db).cwiseAbs().maxCoeff() <= 1e-12);
    if (expert.rows[k].x_true != myopic.rows[k].x_true) trajectories_differ = true;
  }
  CHECK(trajectories_differ);
}

TEST_CASE("measurements are clamped at zero") {
  SimConfig c;
  c.steps = 20;
  c.x0 = state2(0.05, 0.05);
  c.controller = ControllerKind::Myopic;
  c.value = small_value();
  c.noise_std = 1.0;
  c.seed = 5;
  const TrajectoryLog log = simulate(c);
  bool clamped = false;
  for (const TrajectoryRow& r : log.rows) {
    CHECK(r.x_meas.minCoeff() >= 0.0);
    if (r.x_meas.minCoeff() == 0.0) clamped = true;
  }
  CHECK(clamped);
}

TEST_CASE("expert run from the reference stays there at zero cost") {
  SimConfig c = ideal_expert_config(state2(1.0, 1.0), 10, 5);
  const TrajectoryLog log = simulate(c);
  CHECK(log.total_cost == 0.0);
  for (const TrajectoryRow& r : log.rows) {
    CHECK(r.x_true == state2(1.0, 1.0));
    CHECK(r.decision.discrete(0) == 0.0);
    CHECK(r.stage_cost == 0.0);
  }
}

TEST_CASE("plant mismatch changes the closed-loop trajectory") {
  // The mismatch scales the fishing coefficients, so the plants only separate
  // once the controller actually fishes; this start makes it do so early.
  SimConfig c = ideal_expert_config(state2(1.2, 0.9), 6, 6);
  const TrajectoryLog matched = simulate(c);
  bool fished = false;
  for (int k = 0; k < 6; ++k) fished = fished || matched.rows[k].decision.discrete(0) == 1.0;
  REQUIRE(fished);
  c.mismatch_c1 = 1.10;
  c.mismatch_c2 = 1.10;
  const TrajectoryLog mismatched = simulate(c);
  bool differ = false;
  for (int k = 0; k < 6; ++k)
    if (matched.rows[k].x_true != mismatched.rows[k].x_true) differ = true;
  CHECK(differ);
}

TEST_CASE("total cost is the sum of logged stage costs") {
  SimConfig c;
  c.steps = 10;
  c.x0 = state2(0.8, 1.2);
  c.controller = ControllerKind::Myopic;
  c.value = small_value();
  c.noise_std = 0.01;
  c.seed = 3;
  const TrajectoryLog log = simulate(c);
  CHECK(log.total_cost == closed_loop_cost(log));
  double s = 0.0;
  for (const TrajectoryRow& r : log.rows) s += r.stage_cost;
  CHECK(std::abs(log.total_cost - s) <= 1e-12);
}

TEST_CASE("wall-time summaries bound the per-row values") {
  SimConfig c = ideal_expert_config(state2(0.7, 1.1), 6, 6);
  const TrajectoryLog log = simulate(c);
  double max_seen = 0.0;
  for (const TrajectoryRow& r : log.rows) {
    CHECK(r.wall_time >= 0.0);
    max_seen = std::max(max_seen, r.wall_time);
  }
  CHECK(log.max_wall_time == max_seen);
  CHECK(log.mean_wall_time <= log.max_wall_time);
  CHECK(log.mean_wall_time >= 0.0);
}

TEST_CASE("closed_loop_cost sums a hand-built log") {
  TrajectoryLog log;
  for (int k = 0; k < 3; ++k) {
    TrajectoryRow r;
    r.k = k;
    r.stage_cost = static_cast<double>(k + 1);
    log.rows.push_back(r);
  }
  CHECK(closed_loop_cost(log) == 6.0);
  CHECK(closed_loop_cost(TrajectoryLog{}) == 0.0);
}

TEST_CASE("a controller failure aborts the run and records the step") {
  SimConfig c = ideal_expert_config(
      state2(std::numeric_limits<double>::quiet_NaN(), 1.0), 5, 4);
  const TrajectoryLog log = simulate(c);
  CHECK(log.aborted);
  CHECK(log.error_row == 0);
  CHECK(log.rows.empty());
  CHECK_FALSE(log.error.empty());
}

TEST_CASE("invalid simulation settings are rejected") {
  SimConfig c = ideal_expert_config(state2(1.0, 1.0), 5, 4);
  c.steps = -1;
  CHECK_THROWS_AS(simulate(c), Error);
  c = ideal_expert_config(state2(1.0, 1.0), 5, 4);
  c.noise_std = -0.1;
  CHECK_THROWS_AS(simulate(c), Error);
  c = ideal_expert_config(state2(1.0, 1.0), 5, 4);
  c.mismatch_c1 = 0.0;
  CHECK_THROWS_AS(simulate(c), Error);
}

TEST_CASE("demonstration generation matches the expert policy step") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  const StateVec x0 = state2(0.5, 0.7);
  const DemoDataset one = demo_generate(model, 8, {x0}, 1);
  REQUIRE(one.M() == 1);
  CHECK(one.records[0].x == x0);
  CHECK(one.records[0].w.stacked() ==
        expert_policy_step(model, 8, x0).decision.stacked());
  CHECK_FALSE(one.records[0].flagged);
}

TEST_CASE("demonstration datasets index trajectories and steps") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  const std::vector<StateVec> starts = {state2(0.5, 0.7), state2(1.2, 0.9)};
  const DemoDataset ds = demo_generate(model, 6, starts, 5);
  REQUIRE(ds.M() == 10);
  for (int t = 0; t < 2; ++t)
    for (int k = 0; k < 5; ++k) {
      const DemoRecord& r = ds.records[t * 5 + k];
      CHECK(r.traj_id == t);
      CHECK(r.step_index == k);
      if (k == 0) CHECK(r.x == starts[t]);
    }
  ds.validate();

  const DemoDataset again = demo_generate(model, 6, starts, 5);
  REQUIRE(again.M() == ds.M());
  for (int i = 0; i < ds.M(); ++i) {
    CHECK(ds.records[i].x == again.records[i].x);
    CHECK(ds.records[i].w.stacked() == again.records[i].w.stacked());
  }
}

TEST_CASE("successive demonstration states follow the nominal step") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  const DemoDataset ds = demo_generate(model, 6, {state2(0.5, 0.7)}, 6);
  for (int k = 0; k + 1 < ds.M(); ++k)
    CHECK(ds.records[k + 1].x == rk4_step(ds.records[k].x, ds.records[k].w, model));
}

TEST_CASE("an exhausted node budget flags the record") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  const StateVec x0 = (Vec(2) << 1.2303, 0.7498).finished();
  const ExpertSolution free_run = [&] {
    HorizonProblem p;
    p.model = model;
    p.N = 12;
    p.x0 = x0;
    return branch_and_bound(p);
  }();
  REQUIRE(free_run.node_count > 1);
  const DemoDataset ds = demo_generate(model, 12, {x0}, 1, 0.0, 1e4, 1);
  REQUIRE(ds.M() == 1);
  CHECK(ds.records[0].flagged);
}

TEST_CASE("demo_generate validates its arguments") {
  const DiscreteModel model = DiscreteModel::lotka_volterra();
  CHECK_THROWS_AS(demo_generate(model, 0, {state2(1.0, 1.0)}, 1), Error);
  CHECK_THROWS_AS(demo_generate(model, 4, {state2(1.0, 1.0)}, 0), Error);
  CHECK_THROWS_AS(demo_generate(model, 4, {}, 1), Error);
}
