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

#ifndef MINMPC_LINALG_HPP
#define MINMPC_LINALG_HPP

#include <Eigen/Dense>

namespace minmpc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct EigenSym {
  Vec values;   // ascending
  Mat vectors;  // columns match values
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Intended for the
// small dense matrices this library works with (n up to ~10). Throws
// SolverError on non-finite input; cannot fail to converge on finite input.
EigenSym jacobi_eigensym(const Mat& symmetric);

// Smallest eigenvalue of (S + S^T)/2.
double min_eigenvalue(const Mat& s);

// Scaled symmetric vectorization: packs the upper triangle row by row with
// off-diagonal entries multiplied by sqrt(2), so the 2-norm of the packed
// vector equals the Frobenius norm of the matrix.
Vec svec(const Mat& symmetric);
Mat unsvec(const Vec& packed, int n);
int svec_size(int n);

}  // namespace minmpc

#endif  // MINMPC_LINALG_HPP
