#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library code it is compared against.

#include "hydrostate/types.hpp"

#include <functional>
#include <vector>

namespace hydrostate::oracle {

// (D - W) D^-2 (D - W) by explicit triple loops over a dense W.
Matrix dense_ld(const Matrix& W);

// q >= 0 with tau q^(1/0.54) = dh, by bisection.
double bisection_flow(double tau, double dh);

// Series line R -> A -> B with demand only at B. The head at A is found by
// bisection on the mass balance at A, the head at B by an inner bisection on
// the flow through pipe A-B.
struct LineHeads {
  double a = 0.0;
  double b = 0.0;
};
LineHeads line_heads(double reservoir_head, double tau_ra, double tau_ab, double demand_b);

// Hazen-Williams conductivity C^1.852 d^4.87 / (10.67 L) and the analytical
// weight sigma^0.54 max(|dh|, eps)^-0.46, both in 50-digit arithmetic.
double mp_conductivity(double roughness, double diameter, double length);
double mp_aw_weight(double sigma, double dh, double eps);
// Two-pass RMSE in 50-digit arithmetic.
double mp_rmse(const Vector& a, const Vector& b);

// min 1/2 x^T H x + c^T x s.t. A x <= b with H positive definite, by
// projected gradient on the dual (lambda >= 0). Returns the primal point.
Vector dual_projected_gradient(const Matrix& H, const Vector& c, const Matrix& A, const Vector& b, int iterations);

// Interpolation QP  min 1/2 [h^T Ld h + gw g^2]  s.t. Bhat h <= g 1,
// g >= g_min, h[sensed] = hs, solved by eliminating the sensed entries and
// running the dual first-order method. Returns the optimal objective.
struct GsiOracleResult {
  Vector h;
  double gamma = 0.0;
  double objective = 0.0;
};
GsiOracleResult gsi_first_order(const Matrix& Ld, const std::vector<Index>& sensed, const Vector& hs,
                                const Matrix& Bhat, double gamma_weight, double gamma_min, int iterations);

// min 1/2 x^T L x s.t. x[sensed] = xs through the reduced system on the free
// entries.
Vector nullspace_solve(const Matrix& L, const std::vector<Index>& sensed, const Vector& xs);

// One textbook linear Kalman filter iteration: update with y = C x + v, then
// x stays, P += Q.
struct KfState {
  Vector x;
  Matrix P;
};
KfState linear_kf_step(const KfState& s, const Vector& y, const Matrix& C, const Matrix& R, const Matrix& Q);

// Nodes whose metric exceeds the best of the leak node and its neighbours,
// counted by scanning all nodes.
Index exhaustive_over_ranked(const Vector& metric, Index leak, const std::vector<std::vector<Index>>& adjacency);

}  // namespace hydrostate::oracle
