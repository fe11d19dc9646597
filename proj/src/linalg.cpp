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

#include "minmpc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "minmpc/errors.hpp"

namespace minmpc {

EigenSym jacobi_eigensym(const Mat& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  if (symmetric.cols() != n) throw DimensionError("jacobi_eigensym: matrix not square");
  if (!symmetric.allFinite()) throw SolverError("jacobi_eigensym: non-finite input");

  Mat a = 0.5 * (symmetric + symmetric.transpose());
  Mat v = Mat::Identity(n, n);

  const double scale = std::max(a.norm(), 1.0);
  const double stop = 1e-15 * scale;
  const int max_sweeps = 60;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= stop) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  EigenSym out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

double min_eigenvalue(const Mat& s) { return jacobi_eigensym(s).values.minCoeff(); }

int svec_size(int n) { return n * (n + 1) / 2; }

Vec svec(const Mat& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  Vec out(svec_size(n));
  const double root2 = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out(k++) = (i == j) ? symmetric(i, j) : root2 * symmetric(i, j);
    }
  }
  return out;
}

Mat unsvec(const Vec& packed, int n) {
  if (packed.size() != svec_size(n)) throw DimensionError("unsvec: packed size mismatch");
  Mat out(n, n);
  const double inv_root2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i == j) {
        out(i, j) = packed(k);
      } else {
        out(i, j) = out(j, i) = inv_root2 * packed(k);
      }
      ++k;
    }
  }
  return out;
}

}  // namespace minmpc
