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

#ifndef MINMPC_MYOPIC_HPP
#define MINMPC_MYOPIC_HPP

#include <vector>

#include "minmpc/dynamics.hpp"

namespace minmpc {

// Quadratic cost-to-go V(x) = (x - center)' P (x - center).
struct CostToGo {
  Mat P;
  StateVec center;

  void validate() const;
};

struct MyopicSettings {
  double state_lb = 0.0;
  double penalty_weight = 1e4;
};

struct MyopicDecision {
  DecisionVec decision;
  std::vector<double> candidate_costs;  // lexicographic discrete-candidate order
  double wall_time = 0.0;
};

double value_eval(const CostToGo& v, const StateVec& x);

// Stage cost plus cost-to-go at the one-step prediction, with the same soft
// state-positivity penalty the expert uses.
double evaluate_candidate(const StateVec& x, const DecisionVec& w, const DiscreteModel& model,
                          const CostToGo& v, const MyopicSettings& settings = {});

// Enumerates every discrete candidate (continuous entries, if any, solved by
// projected gradient on the box) and returns the minimizer; ties go to the
// lexicographically smallest discrete vector.
MyopicDecision myopic_policy_step(const StateVec& x, const DiscreteModel& model,
                                  const CostToGo& v, const MyopicSettings& settings = {});

}  // namespace minmpc

#endif  // MINMPC_MYOPIC_HPP
