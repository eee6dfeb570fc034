#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace minkrec {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Outward face normal: a finite 3-vector of unit Euclidean norm.
///
/// The constructor re-normalizes its argument and rejects zero or
/// non-finite input with InvalidInput.
class UnitVec3 {
 public:
  static constexpr double kNormTolerance = 1e-9;

  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  friend bool operator==(const UnitVec3& a, const UnitVec3& b) { return a.v_ == b.v_; }

 private:
  Vec3 v_;
};

/// Two normals count as antipodal when their dot product is within this of -1.
inline constexpr double kAntipodalTolerance = 1e-12;

/// Immutable table of pairwise dot products, squared cross norms and triple
/// products of a fixed list of face normals.
///
/// The triple product a^k_ij = <u_k, u_i x u_j> is stored for i < j only; the
/// accessor derives the other ordering from antisymmetry.
class GeometryCache {
 public:
  explicit GeometryCache(std::vector<UnitVec3> normals);

  std::size_t size() const { return normals_.size(); }

  const std::vector<UnitVec3>& normals() const { return normals_; }
  const Vec3& normal(std::size_t i) const { return normals_[i].vec(); }

  /// <u_i, u_j>
  double dot(std::size_t i, std::size_t j) const { return d_(i, j); }
  /// ||u_i x u_j||^2 = 1 - <u_i, u_j>^2
  double cross_sq(std::size_t i, std::size_t j) const { return s_(i, j); }
  /// <u_k, u_i x u_j>
  double triple(std::size_t k, std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? a_[pair_index(i, j) * size() + k] : -a_[pair_index(j, i) * size() + k];
  }

  bool antipodal(std::size_t i, std::size_t j) const {
    return i != j && d_(i, j) <= -1.0 + kAntipodalTolerance;
  }

  const Eigen::MatrixXd& dots() const { return d_; }
  const Eigen::MatrixXd& cross_norms_sq() const { return s_; }

 private:
  std::size_t pair_index(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  std::vector<UnitVec3> normals_;
  Eigen::MatrixXd d_;
  Eigen::MatrixXd s_;
  std::vector<double> a_;
};

GeometryCache build_cache(std::span<const UnitVec3> normals);

/// Solves the 3x3 system M x = rhs by cofactor expansion.
///
/// Throws SingularMatrix when |det M| <= 1e-12 times the product of the row
/// norms.
Vec3 solve3x3(const Mat3& m, const Vec3& rhs);

/// Determinant of the matrix with rows (a, b, c), i.e. <a, b x c>.
inline double det_rows(const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); }

}  // namespace minkrec
