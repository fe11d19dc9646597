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

#include "minmpc/pg.hpp"

#include <algorithm>
#include <cmath>

#include "minmpc/errors.hpp"

namespace minmpc {

namespace {

Vec clamp_box(const Vec& x, const Vec& lb, const Vec& ub) {
  return x.cwiseMax(lb).cwiseMin(ub);
}

}  // namespace

PgResult box_projected_gradient(
    const std::function<double(const Vec&)>& objective,
    const std::function<Vec(const Vec&)>& gradient,
    const Vec& x0, const Vec& lb, const Vec& ub,
    const PgOptions& opts) {
  if (x0.size() != lb.size() || x0.size() != ub.size())
    throw DimensionError("box_projected_gradient: bound dimensions disagree");
  if ((ub - lb).minCoeff() < 0.0)
    throw RelaxationError("box_projected_gradient: empty box (ub < lb)");

  PgResult res;
  res.x = clamp_box(x0, lb, ub);
  res.objective = objective(res.x);
  if (!std::isfinite(res.objective))
    throw RelaxationError("box_projected_gradient: objective not finite at start");

  Vec g = gradient(res.x);
  if (!g.allFinite())
    throw RelaxationError("box_projected_gradient: gradient not finite");

  double step = opts.step_init;
  int stall = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.kkt_norm = (res.x - clamp_box(res.x - g, lb, ub)).cwiseAbs().maxCoeff();
    res.iterations = it;
    if (res.kkt_norm <= opts.tol) {
      res.converged = true;
      return res;
    }

    // Armijo search along the projection arc; sufficient decrease is measured
    // against the actual displacement, which stays valid on the box boundary.
    const double f_old = res.objective;
    double alpha = step;
    Vec s;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const Vec cand = clamp_box(res.x - alpha * g, lb, ub);
      const Vec d = cand - res.x;
      const double f_cand = objective(cand);
      if (std::isfinite(f_cand) && f_cand <= res.objective + opts.armijo_c * g.dot(d)) {
        s = d;
        res.x = cand;
        res.objective = f_cand;
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) {
      // No decrease direction at machine precision: report the current point.
      res.iterations = it + 1;
      res.converged = res.kkt_norm <= opts.tol;
      return res;
    }

    const Vec g_new = gradient(res.x);
    if (!g_new.allFinite())
      throw RelaxationError("box_projected_gradient: gradient not finite");

    // Barzilai-Borwein trial step for the next iteration, safeguarded by the
    // Armijo search above; fall back to mild recovery when curvature along the
    // accepted move is not positive.
    const double sy = s.dot(g_new - g);
    if (sy > 1e-16 * s.squaredNorm()) {
      step = std::min(std::max(s.squaredNorm() / sy, 1e-12), 1e12);
    } else {
      step = std::min(opts.step_init, alpha / opts.backtrack);
    }
    g = g_new;

    // Exit once accepted moves stop changing the objective at double
    // precision; the bound cannot improve further even if the projected
    // gradient norm is still above tol.
    if (f_old - res.objective <= 1e-14 * std::max(1.0, std::abs(f_old))) {
      if (++stall >= 3) {
        res.kkt_norm = (res.x - clamp_box(res.x - g, lb, ub)).cwiseAbs().maxCoeff();
        res.iterations = it + 1;
        res.converged = res.kkt_norm <= opts.tol;
        return res;
      }
    } else {
      stall = 0;
    }
  }

  res.kkt_norm = (res.x - clamp_box(res.x - g, lb, ub)).cwiseAbs().maxCoeff();
  res.iterations = opts.max_iter;
  res.converged = res.kkt_norm <= opts.tol;
  return res;
}

}  // namespace minmpc
