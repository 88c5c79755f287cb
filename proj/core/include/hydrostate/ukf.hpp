#pragma once

#include "hydrostate/hydraulics.hpp"
#include "hydrostate/interpolation.hpp"
#include "hydrostate/network.hpp"

#include <limits>
#include <vector>

namespace hydrostate {

// Scaled unscented transform parameters (alpha, beta, kappa of Wan & van der
// Merwe), named a/b/k to keep them apart from the prediction blend.
struct SigmaParams {
  double a = 1e-3;
  double b = 2.0;
  double k = 0.0;

  double lambda(Index n) const { return a * a * (static_cast<double>(n) + k) - static_cast<double>(n); }
};

struct SigmaPoints {
  Matrix points;  // n x (2n + 1), column 0 is the mean
  Vector wm;
  Vector wc;
};

// Throws NumericalError when P cannot be factorised even with 1e-6 jitter.
SigmaPoints sigma_points(const Vector& mean, const Matrix& P, const SigmaParams& params);

struct UnscentedMoments {
  Vector mean;
  Matrix cov;         // without additive noise
  Matrix propagated;  // one column per sigma point
};

// Weighted mean and covariance of the propagated points. The mean is
// accumulated relative to the central point to avoid cancellation with the
// large negative central weight of small spreads.
UnscentedMoments unscented_moments(const SigmaPoints& sp, Matrix propagated);

template <class Fn>
UnscentedMoments unscented_transform(const SigmaPoints& sp, Fn&& fn) {
  const Vector first = fn(Vector(sp.points.col(0)));
  Matrix propagated(first.size(), sp.points.cols());
  propagated.col(0) = first;
  for (Index i = 1; i < sp.points.cols(); ++i) propagated.col(i) = fn(Vector(sp.points.col(i)));
  return unscented_moments(sp, std::move(propagated));
}

// f(h) = alpha h + (1 - alpha) Phi^-1 Omega h
HeadState predict_f(const HeadState& h, const WeightPair& weights, double alpha_blend);

struct UkfConfig {
  int K = 50;
  int K_u = 5;
  Vector q_diag;   // process noise, n
  Vector r_diag;   // measurement noise, n_s + n_ca
  Vector p0_diag;  // initial covariance, n
  SigmaParams sigma;
  double alpha_blend = 0.0;
  double epsilon_h = kDefaultEpsilonH;

  // Throws InputError when an invariant is violated for the given sizes.
  void validate(Index n, Index m) const;
};

struct UkfState {
  HeadState h;
  Matrix P;
  int k = 0;
  WeightPair weights;
};

struct StepDiagnostics {
  HeadState corrected;  // mean after the correction, before the prediction
  double innovation_norm = 0.0;
};

// One iteration: unscented correction with g and R, then unscented
// prediction through f with Q. Weights are carried over unchanged.
UkfState ukf_step(const UkfState& state, const Vector& y, const UkfConfig& cfg, const MeasurementModel& g,
                  StepDiagnostics* diagnostics = nullptr);

inline bool weight_refresh_due(int k, int K_u) { return k % K_u == 0; }

// Omega^[k]: analytical weights at the incidence of `h` when k mod K_u == 0,
// otherwise `previous`.
WeightPair update_weights(const Network& net, const Conductivity& cond, const HeadState& h,
                          const WeightPair& previous, int k, int K_u, double epsilon_h = kDefaultEpsilonH);

struct IterationRecord {
  int k = 0;
  double rmse = std::numeric_limits<double>::quiet_NaN();            // of h^[k] vs truth
  double innovation_norm = std::numeric_limits<double>::quiet_NaN(); // correction at iteration k
  double trace_p = 0.0;                                              // trace of P^[k]
  bool weights_updated = false;                                      // Omega^[k] freshly computed
};

struct UkfRun {
  HeadState h;
  std::vector<IterationRecord> trace;  // K + 1 records, k = 0..K
  std::vector<HeadState> corrected;    // post-correction means, k = 0..K-1
};

// Static prediction weights.
UkfRun run_ukf_gsi(const HeadState& h0, const Vector& y, const UkfConfig& cfg, const WeightPair& static_weights,
                   const MeasurementModel& g, const HeadState* truth = nullptr);

// Prediction weights refreshed from the corrected state every K_u iterations,
// starting from w0.
UkfRun run_ukf_awgsi(const Network& net, const Conductivity& cond, const HeadState& h0, const Vector& y,
                     const UkfConfig& cfg, const WeightPair& w0, const MeasurementModel& g,
                     const HeadState* truth = nullptr);

}  // namespace hydrostate
