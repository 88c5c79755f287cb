#include "hydrostate/qp.hpp"

#include "hydrostate/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hydrostate {

namespace {

// Solves the KKT system [H A^T; A 0][x; y] = [r1; r2].
void solve_kkt(const Matrix& H, const Matrix& A, const Vector& r1, const Vector& r2, Vector& x, Vector& y) {
  const Index n = H.rows();
  const Index m = A.rows();
  Matrix kkt = Matrix::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = H;
  kkt.topRightCorner(n, m) = A.transpose();
  kkt.bottomLeftCorner(m, n) = A;
  Vector rhs(n + m);
  rhs << r1, r2;

  Vector sol = kkt.partialPivLu().solve(rhs);
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (!sol.allFinite() || (kkt * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
    sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite() || (kkt * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-6 * scale) {
      throw NumericalError("singular KKT system");
    }
  }
  x = sol.head(n);
  y = sol.tail(m);
}

}  // namespace

QpResiduals qp_residuals(const QpProblem& qp, const Vector& x, const Vector& nu, const Vector& lambda) {
  QpResiduals r;
  Vector grad = qp.H * x + qp.c;
  if (qp.Aeq.rows() > 0) {
    grad += qp.Aeq.transpose() * nu;
    r.equality = (qp.Aeq * x - qp.beq).lpNorm<Eigen::Infinity>();
  }
  if (qp.Ain.rows() > 0) {
    grad += qp.Ain.transpose() * lambda;
    const Vector slack = qp.Ain * x - qp.bin;
    r.inequality = std::max(0.0, slack.maxCoeff());
    r.complementarity = (lambda.array() * slack.array()).abs().maxCoeff();
    r.dual_feasibility = std::max(0.0, -lambda.minCoeff());
  }
  r.stationarity = grad.lpNorm<Eigen::Infinity>();
  return r;
}

Vector solve_equality_qp(const Matrix& H, const Vector& c, const Matrix& A, const Vector& b, Vector* multipliers) {
  Vector x;
  Vector y;
  solve_kkt(H, A, -c, b, x, y);
  if (multipliers) *multipliers = y;
  return x;
}

QpResult solve_qp_active_set(const QpProblem& qp, const Vector& x0, std::vector<Index> working,
                             const QpOptions& options) {
  const Index n = qp.H.rows();
  const Index m_eq = qp.Aeq.rows();
  const Index m_in = qp.Ain.rows();
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * (m_in + n));

  Vector x = x0;
  const double feas_tol = 1e-9 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
  if (m_in > 0 && (qp.Ain * x - qp.bin).maxCoeff() > feas_tol) {
    throw NumericalError("active-set start point is infeasible");
  }

  std::vector<bool> in_working(static_cast<std::size_t>(m_in), false);
  for (const Index i : working) in_working[static_cast<std::size_t>(i)] = true;

  Vector nu = Vector::Zero(m_eq);
  Vector lambda = Vector::Zero(m_in);

  for (int iter = 0; iter < max_iter; ++iter) {
    const Index mw = static_cast<Index>(working.size());
    Matrix A(m_eq + mw, n);
    if (m_eq > 0) A.topRows(m_eq) = qp.Aeq;
    for (Index r = 0; r < mw; ++r) A.row(m_eq + r) = qp.Ain.row(working[static_cast<std::size_t>(r)]);

    const Vector g = qp.H * x + qp.c;
    Vector p;
    Vector y;
    solve_kkt(qp.H, A, -g, Vector::Zero(m_eq + mw), p, y);

    if (p.lpNorm<Eigen::Infinity>() <= options.step_tol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      // At the minimiser of the current working set: check multiplier signs.
      Index worst = -1;
      double worst_value = -options.multiplier_tol;
      for (Index r = 0; r < mw; ++r) {
        if (y(m_eq + r) < worst_value) {
          worst_value = y(m_eq + r);
          worst = r;
        }
      }
      if (worst < 0) {
        QpResult result;
        result.x = std::move(x);
        result.eq_multipliers = y.head(m_eq);
        result.ineq_multipliers = Vector::Zero(m_in);
        for (Index r = 0; r < mw; ++r) {
          result.ineq_multipliers(working[static_cast<std::size_t>(r)]) = std::max(0.0, y(m_eq + r));
        }
        result.working_set = std::move(working);
        result.iterations = iter;
        result.residuals = qp_residuals(qp, result.x, result.eq_multipliers, result.ineq_multipliers);
        return result;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(worst)])] = false;
      working.erase(working.begin() + worst);
      continue;
    }

    // Longest feasible step along p.
    double alpha = 1.0;
    Index blocking = -1;
    for (Index i = 0; i < m_in; ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double ap = qp.Ain.row(i).dot(p);
      if (ap <= 0.0) continue;
      const double room = std::max(0.0, qp.bin(i) - qp.Ain.row(i).dot(x));
      const double step = room / ap;
      if (step < alpha) {
        alpha = step;
        blocking = i;
      }
    }
    x += alpha * p;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_working[static_cast<std::size_t>(blocking)] = true;
    }
    if (!x.allFinite()) throw NumericalError("active-set iterate became non-finite");
  }
  const auto residuals = qp_residuals(qp, x, nu, lambda);
  throw NumericalError("active-set QP hit the iteration limit (" + std::to_string(max_iter) + ")",
                       std::max(residuals.stationarity, residuals.inequality));
}

}  // namespace hydrostate
