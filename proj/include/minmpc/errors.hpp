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

#ifndef MINMPC_ERRORS_HPP
#define MINMPC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace minmpc {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix sizes at a module boundary.
struct DimensionError : Error {
  using Error::Error;
};

// Non-finite value produced inside an integration step.
struct IntegrationError : Error {
  IntegrationError(const std::string& msg, int stage_index)
      : Error(msg), stage(stage_index) {}
  int stage;  // RK stage (1..4) that went non-finite
};

// Relaxation line search hit a non-finite objective.
struct RelaxationError : Error {
  using Error::Error;
};

// Numerical failure inside a solver (eigensolve, factorization, ...).
struct SolverError : Error {
  using Error::Error;
};

// Controller could not produce a feasible decision.
struct ControllerError : Error {
  using Error::Error;
};

// Bad record in a dataset (file row or in-memory record index).
struct DataError : Error {
  DataError(const std::string& msg, long row_index) : Error(msg), row(row_index) {}
  long row;
};

// Configuration / file-format parse failure.
struct ParseError : Error {
  ParseError(const std::string& msg, long line_number, std::string key_name = {})
      : Error(msg), line(line_number), key(std::move(key_name)) {}
  long line;
  std::string key;
};

}  // namespace minmpc

#endif  // MINMPC_ERRORS_HPP
