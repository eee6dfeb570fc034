#pragma once

#include "minkrec/geom.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minkrec {

/// Relative slack for "on or inside a plane": 1e-8 (1 + |h_i|).
inline constexpr double kContainmentTolerance = 1e-8;
/// Two vertex candidates within 1e-7 (1 + |v|) are the same vertex.
inline constexpr double kVertexMergeTolerance = 1e-7;

struct MeshVertex {
  Vec3 point;
  /// Sorted indices of the planes through this vertex.
  std::vector<std::size_t> faces;
};

/// Explicit boundary of P(h).
///
/// Faces are in user order; each cycle runs counterclockwise as seen from
/// outside, and dead faces have an empty cycle and zero area.
struct PolyMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<std::size_t>> faces;
  std::vector<UnitVec3> face_normals;
  Eigen::VectorXd support;
  Eigen::VectorXd face_areas;
};

/// Solver metadata recorded in the JSON reconstruction document.
struct SolverSummary {
  int iterations = 0;
  double residual = 0.0;
  std::string status;
};

/// Every vertex of P(h): intersections of non-degenerate plane triples that
/// satisfy all half-space constraints, with near-duplicates merged.
std::vector<MeshVertex> enumerate_vertices(std::span<const UnitVec3> normals, const Eigen::VectorXd& h);

/// Builds the face cycles of P(h). `normals` and `h` are in gauge order and
/// `permutation[g]` is the user index of gauge face g; the returned mesh is
/// in user order. Throws DegenerateMesh for lower-dimensional solids or
/// faces whose vertices are collinear.
PolyMesh build_mesh(std::span<const UnitVec3> normals, const Eigen::VectorXd& h,
                    std::span<const std::size_t> permutation);

/// Same, with faces kept in the given order.
PolyMesh build_mesh(std::span<const UnitVec3> normals, const Eigen::VectorXd& h);

/// Polygon area of each face cycle: half the norm of the summed consecutive
/// cross products, taken about the cycle centroid.
Eigen::VectorXd mesh_face_areas(const PolyMesh& mesh);

/// V - E + (number of nonempty faces), with E half the total cycle length.
long euler_characteristic(const PolyMesh& mesh);

std::size_t edge_count(const PolyMesh& mesh);

std::string dump_obj(const PolyMesh& mesh);
std::string dump_mesh_json(const PolyMesh& mesh, const std::optional<SolverSummary>& solver = std::nullopt);
PolyMesh parse_mesh_json(std::string_view text);

void export_obj(const PolyMesh& mesh, const std::filesystem::path& path);
void export_json(const PolyMesh& mesh, const std::filesystem::path& path,
                 const std::optional<SolverSummary>& solver = std::nullopt);

}  // namespace minkrec
