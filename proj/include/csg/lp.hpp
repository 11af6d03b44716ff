#pragma once

#include "csg/common.hpp"

namespace csg {

// Small dense linear programs (<= a few dozen variables); solved by an
// in-house two-phase tableau simplex with Bland's rule.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Vector x;
  double value = 0.0;
};

// maximize c.x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
// Pass 0-row matrices for absent constraint blocks.
LpResult solve_lp(const Vector& c, const Matrix& A_eq, const Vector& b_eq,
                  const Matrix& A_ub, const Vector& b_ub);

}  // namespace csg
