#include "hydrostate/ukf.hpp"

#include "hydrostate/error.hpp"
#include "hydrostate/scenario.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace hydrostate {

SigmaPoints sigma_points(const Vector& mean, const Matrix& P, const SigmaParams& params) {
  const Index n = mean.size();
  if (P.rows() != n || P.cols() != n) throw std::invalid_argument("sigma_points: covariance size mismatch");
  // a^2 (n + k) directly; n + lambda loses digits to cancellation for small a.
  const double spread = params.a * params.a * (static_cast<double>(n) + params.k);
  if (!(spread > 0.0)) throw InputError("sigma_points: n + lambda must be positive");

  const Matrix sym = 0.5 * (P + P.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    const double scale = std::max(1.0, sym.diagonal().cwiseAbs().maxCoeff());
    bool repaired = false;
    for (double jitter = 1e-12; jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
      llt.compute(sym + Matrix::Identity(n, n) * (jitter * scale));
      if (llt.info() == Eigen::Success) {
        repaired = true;
        break;
      }
    }
    if (!repaired) throw NumericalError("covariance is not positive semidefinite");
  }
  const Matrix root = Matrix(llt.matrixL()) * std::sqrt(spread);

  SigmaPoints sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = mean;
  sp.points.middleCols(1, n) = root.colwise() + mean;
  sp.points.rightCols(n) = (-root).colwise() + mean;

  sp.wm = Vector::Constant(2 * n + 1, 1.0 / (2.0 * spread));
  sp.wc = sp.wm;
  sp.wm(0) = 1.0 - static_cast<double>(2 * n) * sp.wm(1);
  sp.wc(0) = sp.wm(0) + (1.0 - params.a * params.a + params.b);
  return sp;
}

UnscentedMoments unscented_moments(const SigmaPoints& sp, Matrix propagated) {
  UnscentedMoments m;
  const Vector center = propagated.col(0);
  const Matrix offsets = propagated.rightCols(propagated.cols() - 1).colwise() - center;
  const Index tail = sp.wm.size() - 1;
  const Vector shift = offsets * sp.wm.tail(tail);
  m.mean = center + shift;
  // sum_i wc_i (y_i - mean)(y_i - mean)^T expanded around the central point.
  // The central weight only enters through sum(wc), so the result stays PSD
  // instead of cancelling against a weight of order -1/a^2.
  const Vector s = offsets * sp.wc.tail(tail);
  m.cov = offsets * sp.wc.tail(tail).asDiagonal() * offsets.transpose();
  m.cov.noalias() -= shift * s.transpose() + s * shift.transpose();
  m.cov.noalias() += sp.wc.sum() * (shift * shift.transpose());
  m.cov = 0.5 * (m.cov + m.cov.transpose());
  m.propagated = std::move(propagated);
  return m;
}

HeadState predict_f(const HeadState& h, const WeightPair& weights, double alpha_blend) {
  const Vector diffused = (weights.omega * h).cwiseQuotient(weights.phi);
  return alpha_blend * h + (1.0 - alpha_blend) * diffused;
}

void UkfConfig::validate(Index n, Index m) const {
  if (K < 0) throw InputError("UKF: K must be non-negative");
  if (K_u < 1) throw InputError("UKF: K_u must be at least 1");
  if (q_diag.size() != n || p0_diag.size() != n) throw InputError("UKF: Q and P0 must have one entry per node");
  if (r_diag.size() != m) {
    throw InputError("UKF: R must have one entry per measurement (" + std::to_string(m) + ")");
  }
  if (!(q_diag.array() > 0.0).all() || !(r_diag.array() > 0.0).all() || !(p0_diag.array() > 0.0).all()) {
    throw InputError("UKF: Q, R and P0 must be positive definite");
  }
  if (!(alpha_blend >= 0.0 && alpha_blend <= 1.0)) throw InputError("UKF: alpha_blend must lie in [0, 1]");
}

UkfState ukf_step(const UkfState& state, const Vector& y, const UkfConfig& cfg, const MeasurementModel& g,
                  StepDiagnostics* diagnostics) {
  if (y.size() != g.size()) throw std::invalid_argument("ukf_step: measurement size mismatch");

  // Correction.
  const SigmaPoints sp = sigma_points(state.h, state.P, cfg.sigma);
  const UnscentedMoments meas = unscented_transform(sp, [&](const Vector& x) { return g(x); });
  // Work in measurement units whitened by R^-1/2: the innovation covariance
  // becomes C + I, well conditioned even when R spans many decades.
  const Vector w = cfg.r_diag.cwiseSqrt().cwiseInverse();
  Matrix pyy = w.asDiagonal() * meas.cov * w.asDiagonal();
  pyy.diagonal().array() += 1.0;
  // The state deviations of the symmetric set sum to zero, so the output
  // deviations can be taken from the central point.
  const Index tail = sp.points.cols() - 1;
  const Matrix x_dev = sp.points.rightCols(tail).colwise() - state.h;
  const Matrix y_dev = meas.propagated.rightCols(tail).colwise() - meas.propagated.col(0);
  const Matrix pxy = x_dev * sp.wc.tail(tail).asDiagonal() * y_dev.transpose() * w.asDiagonal();

  const Eigen::LLT<Matrix> llt(pyy);
  if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is not positive definite");
  const Vector innovation = y - meas.mean;
  // K nu = A^T z and K Pyy K^T = A^T A with A = L^-1 Pxy^T, z = L^-1 W nu.
  const Matrix a = llt.matrixL().solve(pxy.transpose());
  const Vector z = llt.matrixL().solve(Vector(w.cwiseProduct(innovation)));

  HeadState corrected = state.h + a.transpose() * z;
  Matrix p_corr = state.P - a.transpose() * a;
  p_corr = 0.5 * (p_corr + p_corr.transpose());
  if (!corrected.allFinite() || !p_corr.allFinite()) throw NumericalError("UKF correction produced a non-finite state");

  // Prediction.
  const SigmaPoints sp_pred = sigma_points(corrected, p_corr, cfg.sigma);
  const UnscentedMoments pred =
      unscented_transform(sp_pred, [&](const Vector& x) { return predict_f(x, state.weights, cfg.alpha_blend); });

  UkfState next;
  next.h = pred.mean;
  next.P = pred.cov;
  next.P.diagonal() += cfg.q_diag;
  next.k = state.k + 1;
  next.weights = state.weights;
  if (!next.h.allFinite() || !next.P.allFinite()) throw NumericalError("UKF prediction produced a non-finite state");

  if (diagnostics) {
    diagnostics->corrected = std::move(corrected);
    diagnostics->innovation_norm = innovation.norm();
  }
  return next;
}

WeightPair update_weights(const Network& net, const Conductivity& cond, const HeadState& h,
                          const WeightPair& previous, int k, int K_u, double epsilon_h) {
  if (!weight_refresh_due(k, K_u)) return previous;
  // Oriented by the current state, (M h)_k = |dh_k|, so the refresh reduces
  // to the analytical weights evaluated at h.
  const SparseMatrix incidence = build_incidence(net, h);
  const Vector mh = incidence * h;
  Vector w(net.pipe_count());
  for (Index e = 0; e < net.pipe_count(); ++e) {
    w(e) = std::pow(cond.sigma(e), kHwInverseExponent) * std::pow(std::max(mh(e), epsilon_h), -kHwWeightExponent);
  }
  return weight_pair(
      graph_matrices_from_weights(net, std::span<const double>(w.data(), static_cast<std::size_t>(w.size()))));
}

namespace {

template <class Refresh>
UkfRun run_filter(const HeadState& h0, const Vector& y, const UkfConfig& cfg, const WeightPair& w0,
                  const MeasurementModel& g, const HeadState* truth, Refresh&& refresh) {
  cfg.validate(h0.size(), g.size());
  if (g.state_size() != h0.size()) throw std::invalid_argument("UKF: state size mismatch");

  UkfState state;
  state.h = h0;
  state.P = cfg.p0_diag.asDiagonal();
  state.k = 0;
  state.weights = w0;

  UkfRun run;
  run.trace.reserve(static_cast<std::size_t>(cfg.K) + 1);
  const auto record = [&](int k, bool updated) {
    IterationRecord r;
    r.k = k;
    if (truth) r.rmse = rmse(*truth, state.h);
    r.trace_p = state.P.trace();
    r.weights_updated = updated;
    run.trace.push_back(r);
  };
  record(0, false);

  for (int k = 0; k < cfg.K; ++k) {
    StepDiagnostics diag;
    UkfState next = ukf_step(state, y, cfg, g, &diag);
    run.trace.back().innovation_norm = diag.innovation_norm;
    bool updated = false;
    next.weights = refresh(diag.corrected, state.weights, k + 1, updated);
    run.corrected.push_back(std::move(diag.corrected));
    state = std::move(next);
    record(k + 1, updated);
  }
  run.h = state.h;
  return run;
}

}  // namespace

UkfRun run_ukf_gsi(const HeadState& h0, const Vector& y, const UkfConfig& cfg, const WeightPair& static_weights,
                   const MeasurementModel& g, const HeadState* truth) {
  return run_filter(h0, y, cfg, static_weights, g, truth,
                    [](const HeadState&, const WeightPair& prev, int, bool&) { return prev; });
}

UkfRun run_ukf_awgsi(const Network& net, const Conductivity& cond, const HeadState& h0, const Vector& y,
                     const UkfConfig& cfg, const WeightPair& w0, const MeasurementModel& g, const HeadState* truth) {
  return run_filter(h0, y, cfg, w0, g, truth,
                    [&](const HeadState& h, const WeightPair& prev, int k, bool& updated) {
                      updated = weight_refresh_due(k, cfg.K_u);
                      return update_weights(net, cond, h, prev, k, cfg.K_u, cfg.epsilon_h);
                    });
}

}  // namespace hydrostate
