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

#ifndef MINMPC_PG_HPP
#define MINMPC_PG_HPP

#include <functional>

#include "minmpc/linalg.hpp"

namespace minmpc {

struct PgOptions {
  int max_iter = 2000;
  double tol = 1e-8;          // on the projected-gradient norm
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double step_init = 1.0;
  int max_backtracks = 40;
};

struct PgResult {
  Vec x;
  double objective = 0.0;
  double kkt_norm = 0.0;      // inf-norm of x - proj(x - grad)
  int iterations = 0;
  bool converged = false;
};

// Minimizes f over the box [lb, ub] by projected gradient descent with an
// Armijo backtracking line search on the projection arc.
PgResult box_projected_gradient(
    const std::function<double(const Vec&)>& objective,
    const std::function<Vec(const Vec&)>& gradient,
    const Vec& x0, const Vec& lb, const Vec& ub,
    const PgOptions& opts = {});

}  // namespace minmpc

#endif  // MINMPC_PG_HPP
