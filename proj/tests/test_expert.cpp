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

#include "doctest.h"

#include "minmpc/errors.hpp"
#include "minmpc/expert.hpp"
#include "minmpc/pg.hpp"
#include "minmpc/rng.hpp"
#include "oracles.hpp"

using namespace minmpc;

namespace {

HorizonProblem make_problem(const Vec& x0, int N) {
  HorizonProblem p;
  p.model = DiscreteModel::lotka_volterra();
  p.N = N;
  p.x0 = x0;
  return p;
}

Vec state2(double a, double b) { return (Vec(2) << a, b).finished(); }

}  // namespace

TEST_CASE("horizon cost is zero along the reference with all-zero controls") {
  const HorizonProblem p = make_problem(state2(1.0, 1.0), 6);
  CHECK(eval_horizon_cost_stacked(p, Vec::Zero(6)) == 0.0);
}

TEST_CASE("N=1 horizon cost composes stage and terminal cost by hand") {
  const HorizonProblem p = make_problem(state2(1.0, 1.0), 1);
  const Vec w = (Vec(1) << 1.0).finished();
  const double got = eval_horizon_cost_stacked(p, w);
  const Vec x1 = oracles::rk4_reference_step(state2(1.0, 1.0), 1.0, 0.4, 0.2, 0.1);
  const double want = 0.0 + (x1 - state2(1.0, 1.0)).squaredNorm();
  CHECK(got == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("horizon cost splits additively at an intermediate state") {
  const HorizonProblem p = make_problem(state2(0.5, 0.7), 4);
  Xoshiro256pp rng(21);
  Vec w(4);
  for (int k = 0; k < 4; ++k) w(k) = rng.next_double() < 0.5 ? 0.0 : 1.0;
  const double full = eval_horizon_cost_stacked(p, w);

  const DiscreteModel& m = p.model;
  StateVec x = p.x0;
  double head = 0.0;
  for (int k = 0; k < 2; ++k) {
    head += stage_cost(x, w.segment(k, 1), m.params);
    x = rk4_step_stacked(x, w.segment(k, 1), m);
    head += p.penalty_weight * positivity_penalty(x, p.state_lb);
  }
  HorizonProblem tail = make_problem(x, 2);
  const double rest = eval_horizon_cost_stacked(tail, w.tail(2));
  CHECK(full == doctest::Approx(head + rest).epsilon(1e-13));
}

TEST_CASE("gradient vanishes along the reference trajectory") {
  const HorizonProblem p = make_problem(state2(1.0, 1.0), 5);
  const Vec g = objective_gradient_stacked(p, Vec::Zero(5));
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient matches central finite differences on random instances") {
  Xoshiro256pp rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const HorizonProblem p =
        make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 8);
    Vec w(8);
    for (int k = 0; k < 8; ++k) w(k) = rng.uniform(0.05, 0.95);
    const Vec g = objective_gradient_stacked(p, w);
    const Vec fd = oracles::central_diff(
        [&p](const Vec& v) { return eval_horizon_cost_stacked(p, v); }, w);
    worst = std::max(worst, oracles::rel_err_inf(g, fd));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient of the r_u term alone is the constant r_u vector") {
  HorizonProblem p = make_problem(state2(1.0, 1.0), 4);
  p.model.params.r_u = 0.7;
  HorizonProblem base = make_problem(state2(1.0, 1.0), 4);
  Xoshiro256pp rng(3);
  Vec w(4);
  for (int k = 0; k < 4; ++k) w(k) = rng.uniform(0.0, 1.0);
  const Vec diff = objective_gradient_stacked(p, w) - objective_gradient_stacked(base, w);
  for (int k = 0; k < 4; ++k) CHECK(diff(k) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("relaxation with all entries fixed returns the fixed point untouched") {
  HorizonProblem p = make_problem(state2(0.8, 1.3), 4);
  p.integrality = {Fixing::One, Fixing::Zero, Fixing::Zero, Fixing::One};
  const RelaxedSolution sol = solve_relaxation(p);
  REQUIRE(static_cast<int>(sol.decisions.size()) == 4);
  CHECK(sol.decisions[0].discrete(0) == 1.0);
  CHECK(sol.decisions[1].discrete(0) == 0.0);
  CHECK(sol.decisions[2].discrete(0) == 0.0);
  CHECK(sol.decisions[3].discrete(0) == 1.0);
  CHECK(sol.iterations == 0);
  Vec w(4);
  w << 1.0, 0.0, 0.0, 1.0;
  CHECK(sol.objective == eval_horizon_cost_stacked(p, w));
}

TEST_CASE("N=1 relaxation lower-bounds both integral points") {
  const HorizonProblem p = make_problem(state2(0.6, 1.1), 1);
  const RelaxedSolution sol = solve_relaxation(p);
  const double c0 = eval_horizon_cost_stacked(p, Vec::Zero(1));
  const double c1 = eval_horizon_cost_stacked(p, Vec::Ones(1));
  CHECK(sol.objective <= std::min(c0, c1) + 1e-9);
}

TEST_CASE("N=6 relaxation objective lower-bounds the exhaustive integral minimum") {
  Xoshiro256pp rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const HorizonProblem p =
        make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 6);
    const RelaxedSolution sol = solve_relaxation(p);
    CHECK(sol.objective <= oracles::exhaustive_min(p) + 1e-9);
  }
}

TEST_CASE("node relaxations lower-bound sampled integral completions") {
  Xoshiro256pp rng(818);
  for (int trial = 0; trial < 10; ++trial) {
    HorizonProblem p = make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 7);
    p.integrality.assign(7, Fixing::Free);
    for (int k = 0; k < 3; ++k) {
      const int at = static_cast<int>(rng.next_u64() % 7);
      p.integrality[at] = rng.next_double() < 0.5 ? Fixing::Zero : Fixing::One;
    }
    const RelaxedSolution sol = solve_relaxation(p);
    for (int s = 0; s < 50; ++s) {
      Vec w(7);
      for (int k = 0; k < 7; ++k) {
        if (p.integrality[k] == Fixing::Zero)
          w(k) = 0.0;
        else if (p.integrality[k] == Fixing::One)
          w(k) = 1.0;
        else
          w(k) = rng.next_double() < 0.5 ? 0.0 : 1.0;
      }
      CHECK(sol.objective <= eval_horizon_cost_stacked(p, w) + 1e-9);
    }
  }
}

TEST_CASE("N=1 branch and bound equals the two-leaf argmin") {
  Xoshiro256pp rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const HorizonProblem p =
        make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 1);
    const ExpertSolution sol = branch_and_bound(p);
    const double c0 = eval_horizon_cost_stacked(p, Vec::Zero(1));
    const double c1 = eval_horizon_cost_stacked(p, Vec::Ones(1));
    CHECK(sol.objective == doctest::Approx(std::min(c0, c1)).epsilon(1e-12));
    CHECK(sol.decisions[0].discrete(0) == (c1 < c0 ? 1.0 : 0.0));
  }
}

TEST_CASE("branch and bound matches exhaustive enumeration at N in {4,8}") {
  Xoshiro256pp rng(4242);
  for (int N : {4, 8}) {
    for (int trial = 0; trial < 6; ++trial) {
      const HorizonProblem p =
          make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), N);
      const ExpertSolution sol = branch_and_bound(p);
      REQUIRE(sol.status == SolveStatus::Optimal);
      Vec best_w;
      const double best = oracles::exhaustive_min(p, &best_w);
      CHECK(std::abs(sol.objective - best) <= 1e-9);
      Vec got(N);
      for (int k = 0; k < N; ++k) got(k) = sol.decisions[k].discrete(0);
      CHECK(std::abs(eval_horizon_cost_stacked(p, got) - best) <= 1e-9);
    }
  }
}

TEST_CASE("optimal solutions re-evaluate to their reported objective") {
  Xoshiro256pp rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const HorizonProblem p =
        make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 9);
    const ExpertSolution sol = branch_and_bound(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(eval_horizon_cost(p, sol.decisions) - sol.objective) <= 1e-10);
    for (const DecisionVec& d : sol.decisions) {
      CHECK((d.discrete(0) == 0.0 || d.discrete(0) == 1.0));
      CHECK_FALSE(d.relaxed);
    }
  }
}

TEST_CASE("branch and bound from the reference stays at zero cost") {
  const HorizonProblem p = make_problem(state2(1.0, 1.0), 8);
  const ExpertSolution sol = branch_and_bound(p);
  CHECK(sol.objective == 0.0);
  for (const DecisionVec& d : sol.decisions) CHECK(d.discrete(0) == 0.0);
}

TEST_CASE("incumbent trace is nonincreasing over node expansions") {
  Xoshiro256pp rng(92);
  for (int trial = 0; trial < 4; ++trial) {
    const HorizonProblem p =
        make_problem(state2(rng.uniform(0.3, 1.6), rng.uniform(0.3, 1.6)), 8);
    BnbTrace trace;
    branch_and_bound(p, &trace);
    REQUIRE(trace.incumbents.size() >= 1);
    for (std::size_t i = 1; i < trace.incumbents.size(); ++i)
      CHECK(trace.incumbents[i] <= trace.incumbents[i - 1]);
  }
}

TEST_CASE("identical problems yield identical decisions") {
  const HorizonProblem p = make_problem(state2(1.3222, 0.4866), 10);
  const ExpertSolution a = branch_and_bound(p);
  const ExpertSolution b = branch_and_bound(p);
  CHECK(a.objective == b.objective);
  CHECK(a.node_count == b.node_count);
  REQUIRE(a.decisions.size() == b.decisions.size());
  for (std::size_t k = 0; k < a.decisions.size(); ++k)
    CHECK(a.decisions[k].discrete(0) == b.decisions[k].discrete(0));
}

TEST_CASE("node budget exhaustion reports node_limit status") {
  HorizonProblem base = make_problem(state2(1.2303, 0.7498), 12);
  const ExpertSolution free_run = branch_and_bound(base);
  REQUIRE(free_run.node_count > 1);

  HorizonProblem p = base;
  p.node_budget = 1;
  const ExpertSolution sol = branch_and_bound(p);
  CHECK(sol.status == SolveStatus::NodeLimit);
  CHECK(sol.node_count <= 1);
}

TEST_CASE("expert_policy_step equals the first branch-and-bound decision") {
  const DiscreteModel m = DiscreteModel::lotka_volterra();
  const Vec x = state2(0.5, 0.7);
  const ExpertStep step = expert_policy_step(m, 10, x);
  HorizonProblem p = make_problem(x, 10);
  const ExpertSolution sol = branch_and_bound(p);
  CHECK(step.decision.discrete(0) == sol.decisions[0].discrete(0));

  Vec best_w;
  oracles::exhaustive_min(p, &best_w);
  CHECK(step.decision.discrete(0) == best_w(0));
}

TEST_CASE("expert_policy_step at the reference picks zero fishing") {
  const DiscreteModel m = DiscreteModel::lotka_volterra();
  const ExpertStep step = expert_policy_step(m, 20, state2(1.0, 1.0));
  CHECK(step.decision.discrete(0) == 0.0);
}

TEST_CASE("projected gradient stays inside the box and converges on a quadratic") {
  const Vec target = (Vec(3) << 0.2, -1.0, 2.0).finished();
  const auto f = [&target](const Vec& v) { return (v - target).squaredNorm(); };
  const auto g = [&target](const Vec& v) { return Vec(2.0 * (v - target)); };
  const PgResult res = box_projected_gradient(f, g, Vec::Zero(3), Vec::Zero(3), Vec::Ones(3));
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(res.x(1) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(res.x(2) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("projected gradient rejects an empty box") {
  const auto f = [](const Vec& v) { return v.squaredNorm(); };
  const auto g = [](const Vec& v) { return Vec(2.0 * v); };
  CHECK_THROWS_AS(
      box_projected_gradient(f, g, Vec::Zero(2), Vec::Ones(2), Vec::Zero(2)),
      RelaxationError);
}
