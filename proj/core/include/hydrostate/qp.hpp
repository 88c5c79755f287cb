#pragma once

#include "hydrostate/types.hpp"

#include <vector>

namespace hydrostate {

// Dense convex quadratic program
//   min 1/2 x^T H x + c^T x   s.t.  Aeq x = beq,  Ain x <= bin.
struct QpProblem {
  Matrix H;
  Vector c;
  Matrix Aeq;
  Vector beq;
  Matrix Ain;
  Vector bin;
};

struct QpResiduals {
  double stationarity = 0.0;
  double equality = 0.0;
  double inequality = 0.0;       // largest violation, 0 when feasible
  double complementarity = 0.0;  // max |lambda_i (a_i^T x - b_i)|
  double dual_feasibility = 0.0; // most negative multiplier, as a positive number
};

struct QpResult {
  Vector x;
  Vector eq_multipliers;
  Vector ineq_multipliers;  // zero outside the final working set
  std::vector<Index> working_set;
  int iterations = 0;
  QpResiduals residuals;
};

struct QpOptions {
  int max_iter = 0;  // 0: 10 * (rows of Ain + columns of H)
  double step_tol = 1e-12;
  double multiplier_tol = 1e-12;
};

QpResiduals qp_residuals(const QpProblem& qp, const Vector& x, const Vector& nu, const Vector& lambda);

// Primal active-set method started from a feasible `x0` with initial working
// set `working` (indices into the rows of Ain, assumed active at x0).
// Throws NumericalError on an infeasible start, a singular KKT system or the
// iteration limit.
QpResult solve_qp_active_set(const QpProblem& qp, const Vector& x0, std::vector<Index> working,
                             const QpOptions& options = {});

// min 1/2 x^T H x + c^T x s.t. A x = b through the KKT system. Returns x and
// fills `multipliers` when non-null.
Vector solve_equality_qp(const Matrix& H, const Vector& c, const Matrix& A, const Vector& b,
                         Vector* multipliers = nullptr);

}  // namespace hydrostate
