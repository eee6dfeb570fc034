#include "minkrec/jacobian.hpp"

#include "minkrec/error.hpp"

#include <cmath>
#include <limits>

namespace minkrec {

namespace {

// N^k_ij = (<u_i,u_j><u_k,u_j> - <u_k,u_i>) / ||u_i x u_j||^2, the
// coefficient of h_i in b^k_ij.
double coeff_n(std::size_t k, std::size_t i, std::size_t j, const GeometryCache& cache) {
  return (cache.dot(i, j) * cache.dot(k, j) - cache.dot(k, i)) / cache.cross_sq(i, j);
}

// c_ij = d lambda_ij / d h_i, for a live edge.
double coeff_c(std::size_t i, std::size_t j, const EdgeTable& table, const GeometryCache& cache) {
  const auto kmax = static_cast<std::size_t>(table.k_max(i, j));
  const auto kmin = static_cast<std::size_t>(table.k_min(i, j));
  return coeff_n(kmax, i, j, cache) / cache.triple(kmax, i, j) -
         coeff_n(kmin, i, j, cache) / cache.triple(kmin, i, j);
}

}  // namespace

Eigen::MatrixXd area_jacobian_full(const EdgeTable& table, const GeometryCache& cache) {
  const std::size_t n = cache.size();
  if (table.size() != n) throw LengthMismatch("edge table and geometry cache differ in size");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || table.antipodal(i, j)) continue;
      const double lambda = table.lambda(i, j);
      const double r = table.r(i, j);

      // lambda_ij * d r_ij / d h_beta
      jac(i, i) -= 0.5 * lambda * cache.dot(i, j);
      jac(i, j) += 0.5 * lambda;

      if (lambda == 0.0) continue;

      // d lambda_ij / d h_beta * r_ij
      const auto kmax = static_cast<std::size_t>(table.k_max(i, j));
      const auto kmin = static_cast<std::size_t>(table.k_min(i, j));
      jac(i, i) += 0.5 * coeff_c(i, j, table, cache) * r;
      jac(i, j) += 0.5 * coeff_c(j, i, table, cache) * r;
      jac(i, kmax) += 0.5 * r / cache.triple(kmax, i, j);
      jac(i, kmin) -= 0.5 * r / cache.triple(kmin, i, j);
    }
  }
  return jac;
}

JacobianMatrix jacobian(const SupportVector& h, const EdgeTable& table, const GeometryCache& cache) {
  if (h.size() != cache.size() || h.size() < 4) throw LengthMismatch("support vector does not match faces");
  if (!h.gauge || h.values.head<3>().cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidInput("jacobian requires a gauge-fixed support vector");
  }
  if (table.h.size() != h.values.size() || table.h != h.values) {
    throw StaleTable("edge table was computed at a different support vector");
  }
  const Eigen::MatrixXd full = area_jacobian_full(table, cache);
  return full.rightCols(full.cols() - 3);
}

Eigen::VectorXd residual(const Eigen::Ref<const Eigen::VectorXd>& free, const ProblemInstance& instance,
                         const GeometryCache& cache) {
  if (free.size() + 3 != instance.target_areas.size()) {
    throw LengthMismatch("free support values do not match the instance");
  }
  return face_areas(SupportVector::from_free(free), cache) - instance.target_areas;
}

KinkMargin kink_margin(const EdgeTable& table, const GeometryCache& cache) {
  const std::size_t n = cache.size();
  KinkMargin out;
  out.margin = std::numeric_limits<double>::infinity();
  auto consider = [&](double m, std::size_t i, std::size_t j) {
    if (m < out.margin) out = {m, i, j};
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (table.antipodal(i, j)) continue;
      const double r_ij = table.r(i, j);
      const double r_ji = table.r(j, i);
      const double s = cache.cross_sq(i, j);
      const double upper = table.lambda_max(i, j);
      const double lower = table.lambda_min(i, j);
      const bool killed = table.killed_by_zero_a(i, j) != kNoFace;
      if (!killed) consider(std::abs(upper - lower), i, j);

      const bool live = !killed && upper - lower > 0.0;
      const auto kmax = table.k_max(i, j);
      const auto kmin = table.k_min(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double a = cache.triple(k, i, j);
        const double b = table.h(static_cast<Eigen::Index>(k)) -
                         (r_ij * cache.dot(j, k) + r_ji * cache.dot(i, k)) / s;
        if (std::abs(a) <= kZeroTripleTolerance) {
          consider(std::abs(b), i, j);
        } else if (live && a > 0.0 && static_cast<int>(k) != kmax) {
          consider(b / a - upper, i, j);
        } else if (live && a < 0.0 && static_cast<int>(k) != kmin) {
          consider(lower - b / a, i, j);
        }
      }
    }
  }
  return out;
}

}  // namespace minkrec
