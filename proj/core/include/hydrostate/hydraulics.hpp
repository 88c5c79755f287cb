#pragma once

#include "hydrostate/network.hpp"
#include "hydrostate/types.hpp"

namespace hydrostate {

// Per-pipe Hazen-Williams conductivity sigma_k = C^1.852 d^4.87 / (10.67 L)
// and its reciprocal tau_k (the resistance in  dh = tau q^1.852).
struct Conductivity {
  Vector sigma;
  Vector tau;
};

Conductivity conductivity(const Network& net);

// q_k = (sigma_k max((M h)_k, 0))^0.54, nonnegative in the orientation of M.
FlowState flows_from_heads(const Conductivity& cond, const HeadState& h, const SparseMatrix& incidence);

// c = -M^T q. Positive entries are consumption, reservoirs come out negative.
DemandVector demands_from_flows(const SparseMatrix& incidence, const FlowState& q);

// Signed flows in the structural orientation (from -> to) of every pipe:
// q_k = sign(dh) (sigma_k |dh|)^0.54 with dh = h_from - h_to.
FlowState structural_flows(const Network& net, const Conductivity& cond, const HeadState& h);
// Nodal demands implied by `h` (outflow positive): -M0^T q(h).
DemandVector nodal_demands(const Network& net, const Conductivity& cond, const HeadState& h);

struct SolverOptions {
  double mass_balance_tol = 1e-8;  // m^3/s, infinity norm
  int max_iter = 200;
  double dh_eps = 1e-6;            // m, Jacobian regularisation
  int max_halvings = 30;
};

struct SolveReport {
  HeadState h;
  int iterations = 0;
  double residual = 0.0;  // infinity norm of the junction mass balance
};

// Steady state for given junction demands (length junction_count, m^3/s),
// reservoir heads fixed. Damped Newton on junction heads.
// Throws NumericalError if not converged after max_iter.
SolveReport solve_steady_state(const Network& net, const Conductivity& cond,
                               const Vector& junction_demands, const SolverOptions& options = {});

// Measurement function g(h) = [S h; -M_a^T (T^-1 max(M h, 0))^0.54] with the
// supplied matrices taken literally.
Vector measurement_g(const HeadState& h, const SparseMatrix& S, const SparseMatrix& Ma,
                     const SparseMatrix& incidence, const Vector& tau);

// g with the incidence rebuilt from the evaluated heads themselves, which is
// how the filter evaluates it at every sigma point.
class MeasurementModel {
 public:
  MeasurementModel(const Network& net, const Conductivity& cond, const SensorConfig& sensors);

  Index state_size() const { return n_; }
  Index pressure_count() const { return static_cast<Index>(pressure_.size()); }
  Index amr_count() const { return static_cast<Index>(amr_.size()); }
  Index size() const { return pressure_count() + amr_count(); }

  Vector operator()(const HeadState& h) const;

 private:
  std::vector<Index> from_;
  std::vector<Index> to_;
  Vector sigma_;
  std::vector<Index> pressure_;
  std::vector<Index> amr_;
  Index n_;
};

}  // namespace hydrostate
