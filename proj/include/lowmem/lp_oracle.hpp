#pragma once

#include <Eigen/Core>

#include <vector>

#include "lowmem/geometry.hpp"

namespace lowmem {

// Small dense LP solver used to compute reference optima for generated
// instances. Two-phase tableau simplex with Bland's rule; meant for desk-scale
// problems (a few hundred variables at most).
enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LinearProgram {
  // minimize c^T x  s.t.  A x (sense) b,  x_j >= 0 unless free[j]
  Eigen::MatrixXd A;
  DenseVector b;
  std::vector<RowSense> sense;
  DenseVector c;
  std::vector<bool> free;  // empty means all variables nonnegative
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  DenseVector x;
  double value = 0.0;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace lowmem
