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

#include "minmpc/ioc.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "minmpc/errors.hpp"
#include "minmpc/linalg.hpp"

namespace minmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Mat sym_outer(const Vec& a, const Vec& b) {
  return a * b.transpose() + b * a.transpose();
}

}  // namespace

void DemoDataset::validate() const {
  if (records.empty()) throw DataError("DemoDataset: no records", -1);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DemoRecord& r = records[i];
    if (!r.x.allFinite())
      throw DataError("DemoDataset: non-finite state", static_cast<long>(i));
    for (int j = 0; j < r.w.discrete.size(); ++j) {
      const double z = r.w.discrete(j);
      if (z != 0.0 && z != 1.0)
        throw DataError("DemoDataset: non-integral discrete entry", static_cast<long>(i));
    }
  }
}

Vec KktResidualSystem::r_stat(int i, const Mat& P, const Vec& lambda_i) const {
  const RecordMaps& rec = unique_records[unique_of[i]];
  return rec.a + rec.stat_p * svec(P) + rec.G.transpose() * lambda_i;
}

Vec KktResidualSystem::r_comp(int i, const Vec& lambda_i) const {
  return unique_records[unique_of[i]].g.cwiseProduct(lambda_i);
}

KktResidualSystem assemble_residual_system(const DemoDataset& dataset, const DiscreteModel& model,
                                           std::optional<StateVec> center, double state_lb) {
  if (dataset.records.empty()) throw DataError("assemble_residual_system: empty dataset", -1);

  KktResidualSystem sys;
  sys.n_x = model.n_x;
  sys.n_w = model.n_w();
  sys.n_g = 2 * sys.n_w + sys.n_x;
  sys.record_count = dataset.M();
  sys.center = center.value_or(model.params.x_ref);
  sys.state_lb = state_lb;

  std::map<std::vector<double>, int> index_of;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const DemoRecord& r = dataset.records[i];
    if (r.x.size() != model.n_x || r.w.size() != sys.n_w)
      throw DataError("assemble_residual_system: record dimension mismatch",
                      static_cast<long>(i));
    const Vec w = r.w.stacked();
    if (w.minCoeff() < 0.0 || w.maxCoeff() > 1.0)
      throw DataError("assemble_residual_system: decision outside [0,1] hull",
                      static_cast<long>(i));

    std::vector<double> key(r.x.data(), r.x.data() + r.x.size());
    key.insert(key.end(), w.data(), w.data() + w.size());
    auto it = index_of.find(key);
    if (it != index_of.end()) {
      sys.unique_records[it->second].multiplicity += 1;
      sys.unique_of.push_back(it->second);
      continue;
    }

    RecordMaps rec;
    rec.f = rk4_step_stacked(r.x, w, model);
    rec.B = step_jacobians_stacked(r.x, w, model).wrt_decision;
    rec.a = stage_cost_grad_w(sys.n_w, model.params);
    const Vec d = rec.f - sys.center;
    rec.stat_p = Mat(sys.n_w, svec_size(sys.n_x));
    for (int j = 0; j < sys.n_w; ++j)
      rec.stat_p.row(j) = svec(sym_outer(rec.B.col(j), d)).transpose();
    rec.g = Vec(sys.n_g);
    rec.g.head(sys.n_w) = -w;
    rec.g.segment(sys.n_w, sys.n_w) = w - Vec::Ones(sys.n_w);
    rec.g.tail(sys.n_x) = Vec::Constant(sys.n_x, state_lb) - rec.f;
    rec.G = Mat(sys.n_g, sys.n_w);
    rec.G.topRows(sys.n_w) = -Mat::Identity(sys.n_w, sys.n_w);
    rec.G.middleRows(sys.n_w, sys.n_w) = Mat::Identity(sys.n_w, sys.n_w);
    rec.G.bottomRows(sys.n_x) = -rec.B;

    const int idx = static_cast<int>(sys.unique_records.size());
    index_of.emplace(std::move(key), idx);
    sys.unique_records.push_back(std::move(rec));
    sys.unique_of.push_back(idx);
  }
  return sys;
}

Mat psd_project(const Mat& S) {
  if (S.rows() != S.cols()) throw DimensionError("psd_project: matrix must be square");
  const Mat sym = 0.5 * (S + S.transpose());
  const EigenSym eig = jacobi_eigensym(sym);
  Mat out = Mat::Zero(S.rows(), S.cols());
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 0.0)
      out += eig.values(i) * eig.vectors.col(i) * eig.vectors.col(i).transpose();
  }
  return 0.5 * (out + out.transpose());
}

namespace {

// Exact nonnegative least squares for one record by active-subset
// enumeration; n_g is small so all 2^n_g supports are tried.
Vec record_multipliers(const RecordMaps& rec, const Vec& p_vec) {
  const int n_g = static_cast<int>(rec.g.size());
  const Vec r0 = rec.a + rec.stat_p * p_vec;
  const Mat Q = rec.G * rec.G.transpose() +
                Mat(rec.g.cwiseProduct(rec.g).asDiagonal());
  const Vec lin = rec.G * r0;

  Vec best = Vec::Zero(n_g);
  double best_obj = r0.squaredNorm();
  const double scale = std::max({1.0, lin.cwiseAbs().maxCoeff(), Q.cwiseAbs().maxCoeff()});

  for (int mask = 1; mask < (1 << n_g); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n_g; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    const int m = static_cast<int>(idx.size());
    Mat Qs(m, m);
    Vec ls(m);
    for (int a = 0; a < m; ++a) {
      ls(a) = lin(idx[a]);
      for (int b = 0; b < m; ++b) Qs(a, b) = Q(idx[a], idx[b]);
    }
    const Vec sol = Qs.ldlt().solve(-ls);
    if (!sol.allFinite()) continue;
    if ((Qs * sol + ls).cwiseAbs().maxCoeff() > 1e-10 * scale) continue;
    if (sol.minCoeff() < 0.0) continue;
    Vec lam = Vec::Zero(n_g);
    for (int a = 0; a < m; ++a) lam(idx[a]) = sol(a);
    const double obj = (r0 + rec.G.transpose() * lam).squaredNorm() +
                       rec.g.cwiseProduct(lam).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = lam;
    }
  }
  return best;
}

}  // namespace

Vec optimal_multipliers(const KktResidualSystem& system, int i, const Mat& P) {
  return record_multipliers(system.unique_records[system.unique_of[i]], svec(P));
}

ImputedValue admm_solve_sdp(const KktResidualSystem& system, double rho, double tol,
                            int max_iter) {
  if (system.record_count < 1) throw DataError("admm_solve_sdp: empty system", -1);
  const int n_x = system.n_x;
  const int n_w = system.n_w;
  const int n_g = system.n_g;
  const int m_p = svec_size(n_x);
  const int n_unique = static_cast<int>(system.unique_records.size());
  const int n_cols = m_p + n_unique * n_g;
  const int n_rows = n_unique * (n_w + n_g);

  // Mean-weighted stacked least squares: row blocks carry sqrt(multiplicity/M)
  // so duplicated datasets produce the identical system.
  Mat A = Mat::Zero(n_rows, n_cols);
  Vec b = Vec::Zero(n_rows);
  for (int r = 0; r < n_unique; ++r) {
    const RecordMaps& rec = system.unique_records[r];
    const double sw = std::sqrt(static_cast<double>(rec.multiplicity) /
                                static_cast<double>(system.record_count));
    const int row0 = r * (n_w + n_g);
    const int lam0 = m_p + r * n_g;
    A.block(row0, 0, n_w, m_p) = sw * rec.stat_p;
    A.block(row0, lam0, n_w, n_g) = sw * rec.G.transpose();
    A.block(row0 + n_w, lam0, n_g, n_g) = sw * Mat(rec.g.asDiagonal());
    b.segment(row0, n_w) = -sw * rec.a;
  }

  // Cone-safe equilibration: one positive scalar per variable block (the PSD
  // cone and the orthant are invariant under uniform positive scaling).
  double cp = 0.0;
  for (int c = 0; c < m_p; ++c) cp = std::max(cp, A.col(c).norm());
  double cl = 0.0;
  for (int c = m_p; c < n_cols; ++c) cl = std::max(cl, A.col(c).norm());
  const double sigma_p = (cp > 1e-12) ? 1.0 / cp : 1.0;
  const double sigma_l = (cl > 1e-12) ? 1.0 / cl : 1.0;
  A.leftCols(m_p) *= sigma_p;
  A.rightCols(n_cols - m_p) *= sigma_l;

  ImputedValue out;
  Mat H = 2.0 * (A.transpose() * A);
  H.diagonal().array() += rho;
  Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success) {
    H.diagonal().array() += 1e-10;
    out.ridge_added = true;
    llt.compute(H);
    if (llt.info() != Eigen::Success)
      throw SolverError("admm_solve_sdp: normal equations not factorizable");
  }
  const Vec c_lin = 2.0 * (A.transpose() * b);

  Vec z = Vec::Zero(n_cols);
  z.head(m_p) = svec(Mat::Identity(n_x, n_x)) / sigma_p;
  Vec u = Vec::Zero(n_cols);

  bool converged = false;
  int it = 0;
  Vec x(n_cols), v(n_cols), z_new(n_cols);
  while (it < max_iter) {
    ++it;
    x = llt.solve(c_lin + rho * (z - u));
    v = x + u;
    z_new = v.cwiseMax(0.0);
    z_new.head(m_p) = svec(psd_project(unsvec(v.head(m_p), n_x)));
    u += x - z_new;
    const double primal = (x - z_new).norm();
    const double dual = rho * (z_new - z).norm();
    z = z_new;
    if (primal <= tol && dual <= tol) {
      converged = true;
      break;
    }
  }

  out.P = sigma_p * unsvec(z.head(m_p), n_x);
  out.admm_iterations = it;
  out.converged = converged;
  out.min_eig = min_eigenvalue(out.P);

  std::vector<Vec> lam_unique(n_unique);
  const Vec p_vec = svec(out.P);
  for (int r = 0; r < n_unique; ++r)
    lam_unique[r] = record_multipliers(system.unique_records[r], p_vec);

  out.lambda.resize(system.record_count);
  out.r_stat_inf = 0.0;
  out.r_comp_inf = 0.0;
  out.objective = 0.0;
  for (int i = 0; i < system.record_count; ++i) {
    out.lambda[i] = lam_unique[system.unique_of[i]];
    const Vec rs = system.r_stat(i, out.P, out.lambda[i]);
    const Vec rc = system.r_comp(i, out.lambda[i]);
    out.r_stat_inf = std::max(out.r_stat_inf, rs.cwiseAbs().maxCoeff());
    out.r_comp_inf = std::max(out.r_comp_inf, rc.cwiseAbs().maxCoeff());
    out.objective += rs.squaredNorm() + rc.squaredNorm();
  }
  return out;
}

ConsistencyReport verify_consistency(const DemoDataset& dataset, const DiscreteModel& model,
                                     const ImputedValue& value,
                                     const ConsistencyThresholds& thresholds,
                                     std::optional<StateVec> center, double state_lb) {
  const KktResidualSystem sys = assemble_residual_system(dataset, model, center, state_lb);
  const int n_unique = static_cast<int>(sys.unique_records.size());

  ConsistencyReport rep;
  rep.min_eig = min_eigenvalue(value.P);

  std::vector<Vec> lam_unique(n_unique);
  const Vec p_vec = svec(value.P);
  for (int r = 0; r < n_unique; ++r)
    lam_unique[r] = record_multipliers(sys.unique_records[r], p_vec);

  rep.stat_norms.resize(sys.record_count);
  rep.comp_norms.resize(sys.record_count);
  for (int i = 0; i < sys.record_count; ++i) {
    const Vec& lam = lam_unique[sys.unique_of[i]];
    rep.stat_norms[i] = sys.r_stat(i, value.P, lam).cwiseAbs().maxCoeff();
    rep.comp_norms[i] = sys.r_comp(i, lam).cwiseAbs().maxCoeff();
    rep.r_stat_inf = std::max(rep.r_stat_inf, rep.stat_norms[i]);
    rep.r_comp_inf = std::max(rep.r_comp_inf, rep.comp_norms[i]);
  }

  if (rep.min_eig < thresholds.min_eig) {
    rep.pass = false;
    rep.reason = "not PSD";
  } else if (rep.r_stat_inf > thresholds.stat) {
    rep.pass = false;
    rep.reason = "stationarity residual above threshold";
  } else if (rep.r_comp_inf > thresholds.comp) {
    rep.pass = false;
    rep.reason = "complementarity residual above threshold";
  } else {
    rep.pass = true;
    rep.reason = "ok";
  }
  return rep;
}

}  // namespace minmpc
