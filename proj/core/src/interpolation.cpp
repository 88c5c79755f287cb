#include "hydrostate/interpolation.hpp"

#include "hydrostate/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

namespace hydrostate {

bool WeightPair::operator==(const WeightPair& other) const {
  if (phi != other.phi || omega.rows() != other.omega.rows() || omega.nonZeros() != other.omega.nonZeros()) {
    return false;
  }
  return Matrix(omega) == Matrix(other.omega);
}

WeightPair weight_pair(const GraphMatrices& g) { return {g.W, Vector(g.D.diagonal())}; }

WeightPair gsi_weights(const Network& net) { return weight_pair(build_gsi_adjacency(net)); }

SparseMatrix laplacian_based(const WeightPair& w) {
  const SparseMatrix laplacian = SparseMatrix(w.phi.asDiagonal()) - w.omega;
  const SparseMatrix inv_d2 = SparseMatrix(w.phi.array().square().inverse().matrix().asDiagonal());
  return SparseMatrix(laplacian * inv_d2 * laplacian);
}

namespace {

// Column sensed by each row of a 0-1 selection matrix.
std::vector<Index> selected_columns(const SparseMatrix& S) {
  std::vector<Index> cols(static_cast<std::size_t>(S.rows()), -1);
  for (Index r = 0; r < S.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(S, r); it; ++it) {
      if (it.value() != 0.0) cols[static_cast<std::size_t>(r)] = it.col();
    }
  }
  return cols;
}

}  // namespace

GsiResult gsi_estimate(const GsiProblem& p) {
  const Index n = p.Ld.rows();
  if (p.S.cols() != n || p.hs.size() != p.S.rows() || p.Bhat.cols() != n) {
    throw std::invalid_argument("gsi_estimate: dimension mismatch");
  }
  if (!(p.gamma_weight > 0.0)) throw InputError("gsi_estimate: gamma_weight must be positive");

  // Merge duplicate sensors; conflicting readings make the problem infeasible.
  const auto cols = selected_columns(p.S);
  std::map<Index, double> sensed;
  for (std::size_t r = 0; r < cols.size(); ++r) {
    if (cols[r] < 0) throw InputError("gsi_estimate: empty sensor row");
    const auto [it, inserted] = sensed.emplace(cols[r], p.hs(static_cast<Index>(r)));
    if (!inserted && it->second != p.hs(static_cast<Index>(r))) {
      throw InputError("gsi_estimate: conflicting readings for one sensed node");
    }
  }

  const Index ns = static_cast<Index>(sensed.size());
  const Index ne = p.Bhat.rows();
  const Index nx = n + 1;

  QpProblem qp;
  qp.H = Matrix::Zero(nx, nx);
  qp.H.topLeftCorner(n, n) = Matrix(p.Ld);
  qp.H(n, n) = p.gamma_weight;
  qp.c = Vector::Zero(nx);
  qp.Aeq = Matrix::Zero(ns, nx);
  qp.beq.resize(ns);
  Index row = 0;
  for (const auto& [col, value] : sensed) {
    qp.Aeq(row, col) = 1.0;
    qp.beq(row) = value;
    ++row;
  }
  qp.Ain = Matrix::Zero(ne + 1, nx);
  qp.Ain.topLeftCorner(ne, n) = Matrix(p.Bhat);
  qp.Ain.col(n).setConstant(-1.0);
  qp.bin = Vector::Zero(ne + 1);
  qp.bin(ne) = -kGammaMin;

  // Start from the equality-constrained minimiser with the smallest feasible
  // slack.
  const Vector h_eq = solve_equality_qp(Matrix(p.Ld), Vector::Zero(n), qp.Aeq.leftCols(n), qp.beq);
  Vector x0(nx);
  x0.head(n) = h_eq;
  std::vector<Index> working;
  if (ne > 0) {
    Index arg = 0;
    const double max_violation = (p.Bhat * h_eq).maxCoeff(&arg);
    if (max_violation > kGammaMin) {
      x0(n) = max_violation;
      working.push_back(arg);
    } else {
      x0(n) = kGammaMin;
      working.push_back(ne);
    }
  } else {
    x0(n) = kGammaMin;
    working.push_back(ne);
  }

  QpResult qr = solve_qp_active_set(qp, x0, std::move(working));

  for (const auto& [col, value] : sensed) qr.x(col) = value;
  qr.residuals = qp_residuals(qp, qr.x, qr.eq_multipliers, qr.ineq_multipliers);

  GsiResult result;
  result.h = qr.x.head(n);
  result.gamma = qr.x(n);
  result.objective = 0.5 * (result.h.dot(p.Ld * result.h) + p.gamma_weight * result.gamma * result.gamma);
  result.iterations = qr.iterations;
  result.residuals = qr.residuals;
  return result;
}

Vector aw_pipe_weights(const Network& net, const Conductivity& cond, const HeadState& h_ref, double epsilon_h) {
  Vector w(net.pipe_count());
  for (Index k = 0; k < net.pipe_count(); ++k) {
    const auto& p = net.pipe(k);
    const double dh = std::max(std::abs(h_ref(p.from) - h_ref(p.to)), epsilon_h);
    w(k) = std::pow(cond.sigma(k), kHwInverseExponent) * std::pow(dh, -kHwWeightExponent);
  }
  return w;
}

WeightPair aw_weights(const Network& net, const Conductivity& cond, const HeadState& h_ref, double epsilon_h) {
  const Vector w = aw_pipe_weights(net, cond, h_ref, epsilon_h);
  return weight_pair(graph_matrices_from_weights(net, std::span<const double>(w.data(), static_cast<std::size_t>(w.size()))));
}

Vector awgsi_estimate(const SparseMatrix& Ld_aw, const SparseMatrix& S, const Vector& dh_s) {
  const Index n = Ld_aw.rows();
  const Index ns = S.rows();
  if (S.cols() != n || dh_s.size() != ns) throw std::invalid_argument("awgsi_estimate: dimension mismatch");

  const double ridge = 1e-10 * Ld_aw.diagonal().sum() / static_cast<double>(n);
  Matrix kkt = Matrix::Zero(n + ns, n + ns);
  kkt.topLeftCorner(n, n) = Matrix(Ld_aw);
  kkt.topLeftCorner(n, n).diagonal().array() += ridge;
  kkt.topRightCorner(n, ns) = Matrix(S.transpose());
  kkt.bottomLeftCorner(ns, n) = Matrix(S);
  Vector rhs = Vector::Zero(n + ns);
  rhs.tail(ns) = dh_s;

  const Eigen::PartialPivLU<Matrix> lu(kkt);
  Vector sol = lu.solve(rhs);
  const double scale = std::max(1.0, dh_s.lpNorm<Eigen::Infinity>());
  if (!sol.allFinite() || (kkt * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * scale) {
    throw NumericalError("singular residual-interpolation KKT system");
  }
  Vector dh = sol.head(n);
  const auto cols = selected_columns(S);
  for (std::size_t r = 0; r < cols.size(); ++r) dh(cols[r]) = dh_s(static_cast<Index>(r));
  return dh;
}

AwGsiResult awgsi_heads(const Network& net, const Conductivity& cond, const HeadState& h_nom_estimate,
                        const SparseMatrix& S, const Vector& hs_leak, double epsilon_h) {
  AwGsiResult r;
  r.weights = aw_weights(net, cond, h_nom_estimate, epsilon_h);
  const Vector dh_s = S * h_nom_estimate - hs_leak;
  r.residual = awgsi_estimate(laplacian_based(r.weights), S, dh_s);
  r.h0 = h_nom_estimate - r.residual;
  return r;
}

}  // namespace hydrostate
