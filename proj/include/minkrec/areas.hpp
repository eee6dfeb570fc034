#pragma once

#include "minkrec/geom.hpp"

#include <Eigen/Core>

#include <cstddef>

namespace minkrec {

/// Triple products with |a^k_ij| at or below this take the a = 0 branch.
inline constexpr double kZeroTripleTolerance = 1e-12;
/// Negative face areas above -kNegativeAreaTolerance * (sum of |terms|) are
/// treated as rounding and clamped to zero.
inline constexpr double kNegativeAreaTolerance = 1e-12;

/// Face index placeholder for "no face" in edge records and tables.
inline constexpr int kNoFace = -1;

/// Support values h_i of P(h) = { x : <u_i, x> <= h_i }.
struct SupportVector {
  Eigen::VectorXd values;
  /// Set when the first three entries are pinned to zero by the gauge.
  bool gauge = false;

  SupportVector() = default;
  explicit SupportVector(Eigen::VectorXd h, bool gauge_fixed = false)
      : values(std::move(h)), gauge(gauge_fixed) {}

  /// (0, 0, 0, free...)
  static SupportVector from_free(const Eigen::Ref<const Eigen::VectorXd>& free);

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values(static_cast<Eigen::Index>(i)); }
  Eigen::VectorXd free() const { return values.tail(values.size() - 3); }
};

/// Support values of the same polyhedron seen from `origin`:
/// h_i - <u_i, origin>. Areas are unchanged.
SupportVector recenter(const SupportVector& h, const GeometryCache& cache, const Vec3& origin);

/// Point minimizing sum_i (<u_i, x> - h_i)^2. It lies near the polyhedron,
/// so support values recentered there are of the polyhedron's own size.
Vec3 plane_center(const SupportVector& h, const GeometryCache& cache);

/// Edge data for one ordered pair (i, j).
///
/// The edge e_ij is parametrized as o_ij + t (u_i x u_j) for t in
/// [lambda_min, lambda_max]; lambda is its parameter length. Geometric length
/// is lambda * ||u_i x u_j||.
struct EdgeRecord {
  double r = 0.0;  // h_j - <u_i, u_j> h_i
  double lambda = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int k_min = kNoFace;
  int k_max = kNoFace;
  int killed_by_zero_a = kNoFace;
  bool antipodal = false;
};

/// All ordered-pair edge records at a fixed support vector.
///
/// lambda(i, j) == lambda(j, i) exactly, and k_max(i, j) == k_min(j, i).
struct EdgeTable {
  Eigen::VectorXd h;
  Eigen::MatrixXd r;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd lambda_min;
  Eigen::MatrixXd lambda_max;
  Eigen::MatrixXi k_min;
  Eigen::MatrixXi k_max;
  Eigen::MatrixXi killed_by_zero_a;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> antipodal;

  std::size_t size() const { return static_cast<std::size_t>(h.size()); }
  EdgeRecord record(std::size_t i, std::size_t j) const;
};

/// Bounds of the edge on Q_i ∩ Q_j cut out by every other half-space.
///
/// Ties in the arg-min / arg-max go to the smallest face index. Throws
/// UnboundedEdge when no half-space bounds the line in one of its directions.
/// Antipodal pairs yield a record with lambda = 0 and no bounds.
EdgeRecord edge_bounds(std::size_t i, std::size_t j, const SupportVector& h, const GeometryCache& cache);

EdgeTable edge_lengths(const SupportVector& h, const GeometryCache& cache);

/// A_i = sum_{j != i} lambda_ij r_ij / 2 over the table's edge records.
Eigen::VectorXd face_areas(const EdgeTable& table);
/// A(h). The edge sums are taken about plane_center(h) rather than the
/// origin of h; the result is the same up to rounding and much less prone to
/// cancellation when the origin is far away.
Eigen::VectorXd face_areas(const SupportVector& h, const GeometryCache& cache);

}  // namespace minkrec
