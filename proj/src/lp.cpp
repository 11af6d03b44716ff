#include "csg/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace csg {
namespace {

constexpr double kPivTol = 1e-10;

// Canonical-form tableau: rows = constraints (rhs in the last column),
// cost = objective row to maximize (reduced costs maintained in place).
struct Tableau {
  Matrix rows;            // m x (n + 1)
  std::vector<int> basis; // basic column per row

  int m() const { return static_cast<int>(rows.rows()); }
  int n() const { return static_cast<int>(rows.cols()) - 1; }

  void pivot(int r, int c) {
    rows.row(r) /= rows(r, c);
    for (int i = 0; i < m(); ++i) {
      if (i != r && std::abs(rows(i, c)) > 0.0) rows.row(i) -= rows(i, c) * rows.row(r);
    }
    basis[r] = c;
  }

  // Maximize cost.head(n) . x; cost[n] accumulates the objective value.
  // Returns false on unboundedness.  Bland's rule throughout.
  bool maximize(Eigen::RowVectorXd& cost, int usable_cols) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < usable_cols; ++j) {
        if (cost[j] > kPivTol) { enter = j; break; }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m(); ++i) {
        if (rows(i, enter) > kPivTol) {
          const double ratio = rows(i, n()) / rows(i, enter);
          if (ratio < best - kPivTol ||
              (ratio < best + kPivTol && (leave < 0 || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      cost -= cost[enter] * rows.row(leave);
    }
  }
};

}  // namespace

LpResult solve_lp(const Vector& c, const Matrix& A_eq, const Vector& b_eq,
                  const Matrix& A_ub, const Vector& b_ub) {
  const int n = static_cast<int>(c.size());
  const int me = static_cast<int>(A_eq.rows());
  const int mu = static_cast<int>(A_ub.rows());
  const int m = me + mu;

  // Row classes after sign-normalizing rhs >= 0.
  enum class Rel { LE, GE, EQ };
  Matrix A(m, n);
  Vector b(m);
  std::vector<Rel> rel(m);
  for (int i = 0; i < me; ++i) {
    A.row(i) = A_eq.row(i);
    b[i] = b_eq[i];
    rel[i] = Rel::EQ;
  }
  for (int i = 0; i < mu; ++i) {
    A.row(me + i) = A_ub.row(i);
    b[me + i] = b_ub[i];
    rel[me + i] = Rel::LE;
  }
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
      if (rel[i] == Rel::LE) rel[i] = Rel::GE;
    }
  }

  int n_slack = 0, n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (rel[i] != Rel::EQ) ++n_slack;       // slack (LE) or surplus (GE)
    if (rel[i] != Rel::LE) ++n_art;
  }
  const int total = n + n_slack + n_art;

  Tableau tab;
  tab.rows = Matrix::Zero(m, total + 1);
  tab.basis.assign(m, -1);
  int sc = n, ac = n + n_slack;
  for (int i = 0; i < m; ++i) {
    tab.rows.block(i, 0, 1, n) = A.row(i);
    tab.rows(i, total) = b[i];
    if (rel[i] == Rel::LE) {
      tab.rows(i, sc) = 1.0;
      tab.basis[i] = sc++;
    } else {
      if (rel[i] == Rel::GE) tab.rows(i, sc++) = -1.0;
      tab.rows(i, ac) = 1.0;
      tab.basis[i] = ac++;
    }
  }

  if (n_art > 0) {
    // Phase 1: maximize -(sum of artificials), canonicalized over the
    // artificial basis.
    Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(total + 1);
    for (int j = n + n_slack; j < total; ++j) cost[j] = -1.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= n + n_slack) cost += tab.rows.row(i);
    }
    if (!tab.maximize(cost, n + n_slack)) return {};  // cannot happen: bounded below by -sum b
    // cost[total] tracks the negated phase-1 objective; > 0 means some
    // artificial is stuck at a positive level.
    if (cost[total] > 1e-8) {
      LpResult res;
      res.status = LpResult::Status::Infeasible;
      return res;
    }
    // Drive any artificial still basic (at zero level) out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= n + n_slack) {
        int enter = -1;
        for (int j = 0; j < n + n_slack; ++j) {
          if (std::abs(tab.rows(i, j)) > kPivTol) { enter = j; break; }
        }
        if (enter >= 0) tab.pivot(i, enter);
        // else: redundant row, harmless to leave.
      }
    }
  }

  // Phase 2.
  Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(total + 1);
  cost.head(n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n && std::abs(cost[tab.basis[i]]) > 0.0) {
      cost -= cost[tab.basis[i]] * tab.rows.row(i);
    }
  }
  // Forbid artificials from re-entering by restricting usable columns.
  if (!tab.maximize(cost, n + n_slack)) {
    LpResult res;
    res.status = LpResult::Status::Unbounded;
    return res;
  }

  LpResult res;
  res.status = LpResult::Status::Optimal;
  res.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) res.x[tab.basis[i]] = tab.rows(i, total);
  }
  res.value = c.dot(res.x);
  return res;
}

}  // namespace csg
