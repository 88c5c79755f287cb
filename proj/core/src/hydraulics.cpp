#include "hydrostate/hydraulics.hpp"

#include "hydrostate/error.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <string>

namespace hydrostate {

Conductivity conductivity(const Network& net) {
  Conductivity c;
  c.sigma.resize(net.pipe_count());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const auto& p = net.pipe(k);
    c.sigma(k) = std::pow(p.roughness, kHwFlowExponent) * std::pow(p.diameter, kHwDiameterExponent) /
                 (kHwCoefficient * p.length);
  }
  c.tau = c.sigma.cwiseInverse();
  return c;
}

FlowState flows_from_heads(const Conductivity& cond, const HeadState& h, const SparseMatrix& incidence) {
  const Vector dh = (incidence * h).cwiseMax(0.0);
  return (cond.sigma.array() * dh.array()).pow(kHwInverseExponent).matrix();
}

DemandVector demands_from_flows(const SparseMatrix& incidence, const FlowState& q) {
  return -(incidence.transpose() * q);
}

FlowState structural_flows(const Network& net, const Conductivity& cond, const HeadState& h) {
  FlowState q(net.pipe_count());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const auto& p = net.pipe(k);
    const double dh = h(p.from) - h(p.to);
    q(k) = std::copysign(std::pow(cond.sigma(k) * std::abs(dh), kHwInverseExponent), dh);
  }
  return q;
}

DemandVector nodal_demands(const Network& net, const Conductivity& cond, const HeadState& h) {
  const FlowState q = structural_flows(net, cond, h);
  DemandVector c = DemandVector::Zero(net.node_count());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    c(net.pipe(k).from) -= q(k);
    c(net.pipe(k).to) += q(k);
  }
  return c;
}

SolveReport solve_steady_state(const Network& net, const Conductivity& cond,
                               const Vector& junction_demands, const SolverOptions& options) {
  const Index nj = net.junction_count();
  const Index n = net.node_count();
  if (junction_demands.size() != nj) throw std::invalid_argument("solve_steady_state: demand size mismatch");
  if (net.reservoir_count() < 1) throw NumericalError("steady state needs at least one reservoir");
  if (!junction_demands.allFinite()) throw NumericalError("non-finite junction demand");

  HeadState h(n);
  h.tail(net.reservoir_count()) = net.reservoir_heads();
  h.head(nj).setConstant(net.reservoir_heads().mean());

  const auto residual = [&](const HeadState& state) -> Vector {
    return nodal_demands(net, cond, state).head(nj) - junction_demands;
  };

  Vector f = residual(h);
  double f_norm = f.norm();
  SolveReport report;
  const double sigma_pow_eps = std::pow(options.dh_eps, -kHwWeightExponent);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analysed = false;
  std::vector<Triplet> triplets;

  // Once the tolerance is met, a few more full steps tighten the heads at
  // quadratic rate; they stop as soon as one fails to reduce the residual.
  constexpr int kPolishSteps = 2;
  int polished = 0;
  bool stalled = false;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const double res = f.lpNorm<Eigen::Infinity>();
    if (res < options.mass_balance_tol || polished > 0) {
      if (polished == kPolishSteps || stalled || iter == options.max_iter) {
        report.iterations = iter;
        report.residual = res;
        report.h = std::move(h);
        return report;
      }
      ++polished;
    }
    report.iterations = iter;
    report.residual = res;
    if (iter == options.max_iter) break;

    // Jacobian of the outflow balance: M0^T G M0 on the junction block, with
    // G_k = dq/d(dh), linearised through the origin below dh_eps.
    triplets.clear();
    for (Index k = 0; k < net.pipe_count(); ++k) {
      const auto& p = net.pipe(k);
      const double adh = std::abs(h(p.from) - h(p.to));
      const double s054 = std::pow(cond.sigma(k), kHwInverseExponent);
      const double g = adh < options.dh_eps ? s054 * sigma_pow_eps
                                            : kHwInverseExponent * s054 * std::pow(adh, -kHwWeightExponent);
      const bool jf = p.from < nj;
      const bool jt = p.to < nj;
      if (jf) triplets.emplace_back(p.from, p.from, g);
      if (jt) triplets.emplace_back(p.to, p.to, g);
      if (jf && jt) {
        triplets.emplace_back(p.from, p.to, -g);
        triplets.emplace_back(p.to, p.from, -g);
      }
    }
    Eigen::SparseMatrix<double> jac(nj, nj);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    if (!analysed) {
      ldlt.analyzePattern(jac);
      analysed = true;
    }
    ldlt.factorize(jac);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("steady-state Jacobian factorisation failed", report.residual);
    }
    const Vector step = ldlt.solve(f);

    // Step halving on the residual norm; keep the best trial if none improves.
    double scale = 1.0;
    HeadState best_h = h;
    Vector best_f = f;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      HeadState trial = h;
      trial.head(nj) += scale * step;
      Vector trial_f = residual(trial);
      const double trial_norm = trial_f.norm();
      if (trial_norm < best_norm) {
        best_norm = trial_norm;
        best_h = std::move(trial);
        best_f = std::move(trial_f);
      }
      if (best_norm < f_norm) break;
      if (polished > 0) break;
      scale *= 0.5;
    }
    if (polished > 0 && !(best_norm < f_norm)) {
      stalled = true;
      continue;
    }
    h = std::move(best_h);
    f = std::move(best_f);
    f_norm = best_norm;
    if (!h.allFinite()) throw NumericalError("steady-state iterate became non-finite", report.residual);
  }
  throw NumericalError("steady-state solver did not converge in " + std::to_string(options.max_iter) +
                           " iterations (residual " + std::to_string(report.residual) + " m^3/s)",
                       report.residual);
}

Vector measurement_g(const HeadState& h, const SparseMatrix& S, const SparseMatrix& Ma,
                     const SparseMatrix& incidence, const Vector& tau) {
  const Vector dh = (incidence * h).cwiseMax(0.0);
  const Vector q = (dh.array() / tau.array()).pow(kHwInverseExponent).matrix();
  Vector y(S.rows() + Ma.cols());
  y.head(S.rows()) = S * h;
  y.tail(Ma.cols()) = -(Ma.transpose() * q);
  return y;
}

MeasurementModel::MeasurementModel(const Network& net, const Conductivity& cond, const SensorConfig& sensors)
    : sigma_(cond.sigma), pressure_(sensors.pressure_nodes), amr_(sensors.amr_nodes), n_(net.node_count()) {
  validate_sensors(net, sensors);
  from_.reserve(static_cast<std::size_t>(net.pipe_count()));
  to_.reserve(static_cast<std::size_t>(net.pipe_count()));
  for (const auto& p : net.pipes()) {
    from_.push_back(p.from);
    to_.push_back(p.to);
  }
}

Vector MeasurementModel::operator()(const HeadState& h) const {
  Vector y(size());
  for (Index r = 0; r < pressure_count(); ++r) y(r) = h(pressure_[static_cast<std::size_t>(r)]);
  if (amr_.empty()) return y;

  Vector c = Vector::Zero(n_);
  for (std::size_t k = 0; k < from_.size(); ++k) {
    const double dh = h(from_[k]) - h(to_[k]);
    const double q = std::pow(sigma_(static_cast<Index>(k)) * std::abs(dh), kHwInverseExponent);
    const Index high = dh >= 0.0 ? from_[k] : to_[k];
    const Index low = dh >= 0.0 ? to_[k] : from_[k];
    c(high) -= q;
    c(low) += q;
  }
  for (Index a = 0; a < amr_count(); ++a) y(pressure_count() + a) = c(amr_[static_cast<std::size_t>(a)]);
  return y;
}

}  // namespace hydrostate
