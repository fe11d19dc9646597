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

#ifndef MINMPC_IOC_HPP
#define MINMPC_IOC_HPP

#include <optional>
#include <string>
#include <vector>

#include "minmpc/dynamics.hpp"

namespace minmpc {

struct DemoRecord {
  StateVec x;
  DecisionVec w;
  int traj_id = 0;
  int step_index = 0;
  bool flagged = false;  // solver hit its node budget at this step
};

struct DemoDataset {
  std::vector<DemoRecord> records;

  int M() const { return static_cast<int>(records.size()); }
  void validate() const;
};

// Affine maps for one observed pair: r_stat(P, lambda) = a + stat_p*svec(P)
// + G' lambda, r_comp(lambda) = g .* lambda. Identical pairs are stored once
// with a multiplicity so the solver's behavior does not depend on duplication.
struct RecordMaps {
  Vec a;
  Mat stat_p;
  Mat G;
  Vec g;
  Mat B;
  Vec f;
  int multiplicity = 1;
};

struct KktResidualSystem {
  int n_x = 0;
  int n_w = 0;
  int n_g = 0;
  int record_count = 0;
  std::vector<RecordMaps> unique_records;
  std::vector<int> unique_of;
  StateVec center;
  double state_lb = 0.0;

  Vec r_stat(int i, const Mat& P, const Vec& lambda_i) const;
  Vec r_comp(int i, const Vec& lambda_i) const;
};

// Constraint set of the one-step problem: -w <= 0, w - 1 <= 0, state_lb - f <= 0.
// The value term is the gradient of (f - center)' P (f - center) in w; center
// defaults to the model reference.
KktResidualSystem assemble_residual_system(const DemoDataset& dataset, const DiscreteModel& model,
                                           std::optional<StateVec> center = std::nullopt,
                                           double state_lb = 0.0);

Mat psd_project(const Mat& S);

struct ImputedValue {
  Mat P;
  std::vector<Vec> lambda;  // per dataset record, the exact minimizers given P
  double r_stat_inf = 0.0;
  double r_comp_inf = 0.0;
  double min_eig = 0.0;
  double objective = 0.0;
  int admm_iterations = 0;
  bool converged = false;
  bool ridge_added = false;
};

ImputedValue admm_solve_sdp(const KktResidualSystem& system, double rho = 1.0,
                            double tol = 1e-9, int max_iter = 20000);

// Exact per-record multiplier fit for a fixed P: minimizes the record's
// squared residuals over lambda >= 0 by enumerating active subsets.
Vec optimal_multipliers(const KktResidualSystem& system, int i, const Mat& P);

struct ConsistencyThresholds {
  double stat = 1e-3;
  double comp = 1e-3;
  double min_eig = -1e-10;
};

struct ConsistencyReport {
  std::vector<double> stat_norms;
  std::vector<double> comp_norms;
  double r_stat_inf = 0.0;
  double r_comp_inf = 0.0;
  double min_eig = 0.0;
  bool pass = false;
  std::string reason;
};

ConsistencyReport verify_consistency(const DemoDataset& dataset, const DiscreteModel& model,
                                     const ImputedValue& value,
                                     const ConsistencyThresholds& thresholds = {},
                                     std::optional<StateVec> center = std::nullopt,
                                     double state_lb = 0.0);

}  // namespace minmpc

#endif  // MINMPC_IOC_HPP
