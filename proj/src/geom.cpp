#include "minkrec/geom.hpp"

#include "minkrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minkrec {

UnitVec3::UnitVec3(const Vec3& v) {
  if (!is_finite(v)) throw InvalidInput("normal has non-finite components");
  const double n = v.norm();
  if (!(n > 0.0)) throw InvalidInput("normal has zero length");
  // Leave vectors that are already unit length untouched so that parsing a
  // written normal reproduces it bit for bit.
  v_ = std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? v : Vec3(v / n);
  if (std::abs(v_.norm() - 1.0) > kNormTolerance) throw InvalidInput("normal could not be normalized");
}

GeometryCache::GeometryCache(std::vector<UnitVec3> normals) : normals_(std::move(normals)) {
  const std::size_t n = normals_.size();
  const auto sn = static_cast<Eigen::Index>(n);
  d_.resize(sn, sn);
  s_.resize(sn, sn);
  for (std::size_t i = 0; i < n; ++i) {
    d_(i, i) = 1.0;
    s_(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::clamp(normal(i).dot(normal(j)), -1.0, 1.0);
      const double s = normal(i).cross(normal(j)).squaredNorm();
      d_(i, j) = d_(j, i) = d;
      s_(i, j) = s_(j, i) = s;
    }
  }

  a_.assign(n * (n - 1) / 2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 c = normal(i).cross(normal(j));
      double* row = &a_[pair_index(i, j) * n];
      for (std::size_t k = 0; k < n; ++k) {
        row[k] = (k == i || k == j) ? 0.0 : normal(k).dot(c);
      }
    }
  }
}

GeometryCache build_cache(std::span<const UnitVec3> normals) {
  return GeometryCache(std::vector<UnitVec3>(normals.begin(), normals.end()));
}

Vec3 solve3x3(const Mat3& m, const Vec3& rhs) {
  const Vec3 r0 = m.row(0).transpose();
  const Vec3 r1 = m.row(1).transpose();
  const Vec3 r2 = m.row(2).transpose();

  // Columns of the adjugate are the pairwise cross products of the rows.
  const Vec3 c12 = r1.cross(r2);
  const Vec3 c20 = r2.cross(r0);
  const Vec3 c01 = r0.cross(r1);
  const double det = r0.dot(c12);

  const double scale = r0.norm() * r1.norm() * r2.norm();
  if (!(std::abs(det) > 1e-12 * scale)) throw SingularMatrix("3x3 system is singular");

  return (c12 * rhs(0) + c20 * rhs(1) + c01 * rhs(2)) / det;
}

}  // namespace minkrec
