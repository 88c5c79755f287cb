#pragma once

#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"
#include "hydrostate/qp.hpp"

namespace hydrostate {

// Weighted adjacency Omega and its degree Phi (stored as the diagonal).
struct WeightPair {
  SparseMatrix omega;
  Vector phi;

  bool operator==(const WeightPair& other) const;
};

WeightPair weight_pair(const GraphMatrices& g);
// Inverse-length weights of the plain graph interpolation.
WeightPair gsi_weights(const Network& net);

// Smoothness matrix (D - W) D^-2 (D - W) of a weight pair.
SparseMatrix laplacian_based(const WeightPair& w);

inline constexpr double kDefaultEpsilonH = 1e-4;  // m
inline constexpr double kDefaultGammaWeight = 10.0;
inline constexpr double kGammaMin = 1e-9;

struct GsiProblem {
  SparseMatrix Ld;
  SparseMatrix S;
  Vector hs;
  SparseMatrix Bhat;
  double gamma_weight = kDefaultGammaWeight;
};

struct GsiResult {
  HeadState h;
  double gamma = 0.0;
  double objective = 0.0;
  int iterations = 0;
  QpResiduals residuals;
};

// min 1/2 [h^T Ld h + gamma_weight gamma^2]
// s.t. Bhat h <= gamma 1, gamma >= kGammaMin, S h = hs.
GsiResult gsi_estimate(const GsiProblem& problem);

// Per-pipe analytical weight sigma^0.54 max(|dh_ref|, epsilon_h)^-0.46.
Vector aw_pipe_weights(const Network& net, const Conductivity& cond, const HeadState& h_ref,
                       double epsilon_h = kDefaultEpsilonH);
WeightPair aw_weights(const Network& net, const Conductivity& cond, const HeadState& h_ref,
                      double epsilon_h = kDefaultEpsilonH);

// min 1/2 dh^T Ld_aw dh s.t. S dh = dh_s, through the ridge-regularised KKT
// system.
Vector awgsi_estimate(const SparseMatrix& Ld_aw, const SparseMatrix& S, const Vector& dh_s);

struct AwGsiResult {
  HeadState h0;       // h_nom - dh
  Vector residual;    // dh
  WeightPair weights; // the W^AW / D^AW used
};

// Leak-state heads from a leak-free estimate and leak-scenario head readings.
AwGsiResult awgsi_heads(const Network& net, const Conductivity& cond, const HeadState& h_nom_estimate,
                        const SparseMatrix& S, const Vector& hs_leak, double epsilon_h = kDefaultEpsilonH);

}  // namespace hydrostate
