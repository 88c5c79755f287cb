#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>

namespace hydrostate {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Nodal hydraulic heads (m), one entry per node in network order.
using HeadState = Vector;
// Pipe flows (m^3/s), signed with respect to the orientation of a companion
// incidence matrix.
using FlowState = Vector;
// Nodal consumptions (m^3/s); reservoir entries are negative inflows.
using DemandVector = Vector;

// Hazen-Williams exponents. 0.54 ~= 1/1.852 is used as-is, not as the exact
// reciprocal.
inline constexpr double kHwFlowExponent = 1.852;
inline constexpr double kHwDiameterExponent = 4.87;
inline constexpr double kHwCoefficient = 10.67;
inline constexpr double kHwInverseExponent = 0.54;
inline constexpr double kHwWeightExponent = 0.46;

inline constexpr double kLitresPerCubicMetre = 1000.0;

}  // namespace hydrostate
