#include "minkrec/areas.hpp"

#include "minkrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace minkrec {

namespace {

void check_size(const SupportVector& h, const GeometryCache& cache) {
  if (h.size() != cache.size()) {
    throw LengthMismatch("support vector has " + std::to_string(h.size()) + " entries for " +
                         std::to_string(cache.size()) + " faces");
  }
  if (!h.values.allFinite()) throw InvalidInput("support vector has non-finite entries");
}

}  // namespace

SupportVector SupportVector::from_free(const Eigen::Ref<const Eigen::VectorXd>& free) {
  Eigen::VectorXd h(free.size() + 3);
  h << 0.0, 0.0, 0.0, free;
  return SupportVector(std::move(h), true);
}

SupportVector recenter(const SupportVector& h, const GeometryCache& cache, const Vec3& origin) {
  check_size(h, cache);
  Eigen::VectorXd shifted = h.values;
  for (std::size_t i = 0; i < cache.size(); ++i) shifted(static_cast<Eigen::Index>(i)) -= cache.normal(i).dot(origin);
  return SupportVector(std::move(shifted));
}

Vec3 plane_center(const SupportVector& h, const GeometryCache& cache) {
  check_size(h, cache);
  Mat3 gram = Mat3::Zero();
  Vec3 rhs = Vec3::Zero();
  for (std::size_t i = 0; i < cache.size(); ++i) {
    gram += cache.normal(i) * cache.normal(i).transpose();
    rhs += h[i] * cache.normal(i);
  }
  return gram.ldlt().solve(rhs);
}

EdgeRecord EdgeTable::record(std::size_t i, std::size_t j) const {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  EdgeRecord rec;
  rec.r = r(a, b);
  rec.lambda = lambda(a, b);
  rec.lambda_min = lambda_min(a, b);
  rec.lambda_max = lambda_max(a, b);
  rec.k_min = k_min(a, b);
  rec.k_max = k_max(a, b);
  rec.killed_by_zero_a = killed_by_zero_a(a, b);
  rec.antipodal = antipodal(a, b);
  return rec;
}

EdgeRecord edge_bounds(std::size_t i, std::size_t j, const SupportVector& h, const GeometryCache& cache) {
  EdgeRecord rec;
  const double dij = cache.dot(i, j);
  rec.r = h[j] - dij * h[i];
  if (cache.antipodal(i, j)) {
    rec.antipodal = true;
    return rec;
  }

  const double r_ji = h[i] - dij * h[j];
  const double s = cache.cross_sq(i, j);
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < cache.size(); ++k) {
    if (k == i || k == j) continue;
    const double a = cache.triple(k, i, j);
    const double b = h[k] - (rec.r * cache.dot(j, k) + r_ji * cache.dot(i, k)) / s;
    if (a > kZeroTripleTolerance) {
      const double q = b / a;
      if (q < upper) {
        upper = q;
        rec.k_max = static_cast<int>(k);
      }
    } else if (a < -kZeroTripleTolerance) {
      const double q = b / a;
      if (q > lower) {
        lower = q;
        rec.k_min = static_cast<int>(k);
      }
    } else if (rec.killed_by_zero_a == kNoFace) {
      // u_k = alpha u_i + beta u_j and b = h_k - alpha h_i - beta h_j. When
      // b ~ 0 all three planes share the line; only the pair whose normals
      // enclose u_k keeps it, so the segment is counted once per face.
      const double alpha = (cache.dot(i, k) - dij * cache.dot(j, k)) / s;
      const double beta = (cache.dot(j, k) - dij * cache.dot(i, k)) / s;
      const double scale = std::abs(h[k]) + std::abs(alpha * h[i]) + std::abs(beta * h[j]);
      const bool tie = std::abs(b) <= kZeroTripleTolerance * scale;
      if (tie ? !(alpha > 0.0 && beta > 0.0) : b < 0.0) rec.killed_by_zero_a = static_cast<int>(k);
    }
  }

  if (rec.k_max == kNoFace || rec.k_min == kNoFace) throw UnboundedEdge(i, j);

  rec.lambda_max = upper;
  rec.lambda_min = lower;
  rec.lambda = rec.killed_by_zero_a != kNoFace ? 0.0 : std::max(0.0, upper - lower);
  return rec;
}

EdgeTable edge_lengths(const SupportVector& h, const GeometryCache& cache) {
  check_size(h, cache);
  const auto n = static_cast<Eigen::Index>(cache.size());

  EdgeTable t;
  t.h = h.values;
  t.r = Eigen::MatrixXd::Zero(n, n);
  t.lambda = Eigen::MatrixXd::Zero(n, n);
  t.lambda_min = Eigen::MatrixXd::Zero(n, n);
  t.lambda_max = Eigen::MatrixXd::Zero(n, n);
  t.k_min = Eigen::MatrixXi::Constant(n, n, kNoFace);
  t.k_max = Eigen::MatrixXi::Constant(n, n, kNoFace);
  t.killed_by_zero_a = Eigen::MatrixXi::Constant(n, n, kNoFace);
  t.antipodal.setConstant(n, n, false);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const EdgeRecord e = edge_bounds(static_cast<std::size_t>(i), static_cast<std::size_t>(j), h, cache);
      t.r(i, j) = e.r;
      t.r(j, i) = h.values(i) - cache.dot(i, j) * h.values(j);
      t.lambda(i, j) = t.lambda(j, i) = e.lambda;
      t.killed_by_zero_a(i, j) = t.killed_by_zero_a(j, i) = e.killed_by_zero_a;
      t.antipodal(i, j) = t.antipodal(j, i) = e.antipodal;
      if (e.antipodal) continue;
      // Reversing the pair flips the edge direction: a^k_ji = -a^k_ij while
      // b^k_ji = b^k_ij, so the bounds swap roles and change sign.
      t.lambda_min(i, j) = e.lambda_min;
      t.lambda_max(i, j) = e.lambda_max;
      t.k_min(i, j) = e.k_min;
      t.k_max(i, j) = e.k_max;
      t.lambda_min(j, i) = -e.lambda_max;
      t.lambda_max(j, i) = -e.lambda_min;
      t.k_min(j, i) = e.k_max;
      t.k_max(j, i) = e.k_min;
    }
  }
  return t;
}

Eigen::VectorXd face_areas(const EdgeTable& table) {
  const auto n = static_cast<Eigen::Index>(table.size());
  Eigen::VectorXd areas(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    double magnitude = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double term = 0.5 * table.lambda(i, j) * table.r(i, j);
      sum += term;
      magnitude += std::abs(term);
    }
    if (sum < 0.0) {
      if (sum < -kNegativeAreaTolerance * std::max(1.0, magnitude)) {
        throw InternalError("face " + std::to_string(i) + " has negative area " + std::to_string(sum));
      }
      sum = 0.0;
    }
    areas(i) = sum;
  }
  return areas;
}

Eigen::VectorXd face_areas(const SupportVector& h, const GeometryCache& cache) {
  return face_areas(edge_lengths(recenter(h, cache, plane_center(h, cache)), cache));
}

}  // namespace minkrec
