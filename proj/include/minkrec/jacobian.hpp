#pragma once

#include "minkrec/areas.hpp"
#include "minkrec/geom.hpp"
#include "minkrec/instance.hpp"

#include <Eigen/Core>

#include <cstddef>

namespace minkrec {

/// F x (F - 3) matrix of d A_i / d h_beta, beta ranging over the free
/// (non-gauge) support values.
using JacobianMatrix = Eigen::MatrixXd;

/// Full F x F matrix of d A_i / d h_j at the support vector the table was
/// computed for. At kinks it returns the one-sided value selected by the
/// table's tie-break.
Eigen::MatrixXd area_jacobian_full(const EdgeTable& table, const GeometryCache& cache);

/// Jacobian of the gauge-reduced residual h~ -> A(0, 0, 0, h~) - A0.
///
/// Requires a gauge-fixed support vector; throws StaleTable when `table` was
/// built for a different support vector.
JacobianMatrix jacobian(const SupportVector& h, const EdgeTable& table, const GeometryCache& cache);

/// A(0, 0, 0, free) - target_areas, in gauge order.
Eigen::VectorXd residual(const Eigen::Ref<const Eigen::VectorXd>& free, const ProblemInstance& instance,
                         const GeometryCache& cache);

/// Distance of a support vector from the non-differentiable set of A(h),
/// measured on the edge parameters b^k_ij / a^k_ij.
struct KinkMargin {
  double margin = 0.0;
  std::size_t face_i = 0;
  std::size_t face_j = 0;
};

/// Smallest of: the gap between the best and runner-up bound of every live
/// edge, |lambda_max - lambda_min| of every non-killed pair, and |b^k_ij| of
/// every a = 0 constraint.
KinkMargin kink_margin(const EdgeTable& table, const GeometryCache& cache);

}  // namespace minkrec
