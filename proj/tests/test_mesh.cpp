#include "minkrec/error.hpp"
#include "minkrec/mesh.hpp"
#include "minkrec/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace minkrec {
namespace {

using testing::cube_normals;
using testing::vec;

struct Solved {
  ProblemInstance instance;
  SupportVector h;
};

Solved solved_random(std::size_t faces, std::uint64_t seed) {
  const InstanceData d = generate_random(faces, seed);
  ProblemInstance p = make_instance(d.normals, d.areas);
  const GeometryCache c(p.normals);
  const SolveResult r = solve(p, c);
  EXPECT_EQ(r.status, SolveStatus::Converged);
  return {std::move(p), r.h_star};
}

TEST(EnumerateVertices, CubeCorners) {
  const auto v = enumerate_vertices(cube_normals(), vec({0, 0, 0, 1, 1, 1}));
  ASSERT_EQ(v.size(), 8u);
  std::set<std::array<double, 3>> pts;
  for (const auto& m : v) {
    pts.insert({m.point.x(), m.point.y(), m.point.z()});
    EXPECT_EQ(m.faces.size(), 3u);
  }
  for (double x : {0.0, -1.0})
    for (double y : {0.0, -1.0})
      for (double z : {0.0, -1.0}) EXPECT_TRUE(pts.count({x, y, z})) << x << " " << y << " " << z;
}

TEST(EnumerateVertices, CollapsedSlab) {
  const auto v = enumerate_vertices(cube_normals(), vec({0, 0, 0, 0, 1, 1}));
  EXPECT_EQ(v.size(), 4u);
  EXPECT_THROW(build_mesh(cube_normals(), vec({0, 0, 0, 0, 1, 1})), DegenerateMesh);
}

TEST(BuildMesh, Cube) {
  const PolyMesh m = build_mesh(cube_normals(), vec({0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(edge_count(m), 12u);
  EXPECT_EQ(euler_characteristic(m), 2);
  EXPECT_EQ(mesh_face_areas(m), Eigen::VectorXd::Ones(6));
  for (std::size_t f = 0; f < 6; ++f) {
    ASSERT_EQ(m.faces[f].size(), 4u);
    // Counterclockwise seen from outside: the cycle's vector area points along u_f.
    Vec3 area = Vec3::Zero();
    const auto& cyc = m.faces[f];
    for (std::size_t k = 0; k < cyc.size(); ++k)
      area += m.vertices[cyc[k]].cross(m.vertices[cyc[(k + 1) % cyc.size()]]);
    EXPECT_GT(area.dot(m.face_normals[f].vec()), 0.0);
  }
}

TEST(BuildMesh, PermutationRestoresUserOrder) {
  const std::vector<UnitVec3> user{UnitVec3(1, 0, 0), UnitVec3(-1, 0, 0), UnitVec3(0, 1, 0),
                                   UnitVec3(0, -1, 0), UnitVec3(0, 0, 1), UnitVec3(0, 0, -1)};
  const std::vector<double> areas{1, 1, 2, 2, 3, 3};
  const ProblemInstance p = gauge_order(user, areas);
  const Eigen::VectorXd h = p.to_gauge_order(vec({0, 3, 0, 2, 0, 1}));
  ASSERT_EQ(h.head<3>(), Eigen::Vector3d::Zero());
  const PolyMesh m = build_mesh(p.normals, h, p.permutation);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(m.face_normals[i], user[i]);
  // Box [-3, 0] x [-2, 0] x [-1, 0].
  EXPECT_NEAR(m.face_areas(0), 2.0, 1e-14);
  EXPECT_NEAR(m.face_areas(2), 3.0, 1e-14);
  EXPECT_NEAR(m.face_areas(4), 6.0, 1e-14);
}

TEST(BuildMesh, DeadFaceHasEmptyCycle) {
  const PolyMesh m = build_mesh(testing::seven_normals(), vec({0, 0, 0, 1, 1, 1, 2}));
  EXPECT_TRUE(m.faces[6].empty());
  EXPECT_EQ(m.face_areas(6), 0.0);
  EXPECT_EQ(euler_characteristic(m), 2);
  const std::string json = dump_mesh_json(m);
  const PolyMesh back = parse_mesh_json(json);
  EXPECT_TRUE(back.faces[6].empty());
  EXPECT_EQ(back.face_areas(6), 0.0);
}

TEST(BuildMesh, SolvedRandomProperties) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Solved s = solved_random(50, seed);
    const PolyMesh m = build_mesh(s.instance.normals, s.h.values, s.instance.permutation);
    EXPECT_EQ(euler_characteristic(m), 2);
    Vec3 closure = Vec3::Zero();
    for (std::size_t i = 0; i < m.faces.size(); ++i) closure += m.face_areas(static_cast<Eigen::Index>(i)) * m.face_normals[i].vec();
    EXPECT_LE(closure.norm(), 1e-8 * m.face_areas.sum());
    for (const Vec3& v : m.vertices) {
      for (std::size_t i = 0; i < m.faces.size(); ++i) {
        const double hi = m.support(static_cast<Eigen::Index>(i));
        EXPECT_LE(m.face_normals[i].vec().dot(v), hi + 1e-8 * (1.0 + std::abs(hi)));
      }
    }
    const auto verts = enumerate_vertices(s.instance.normals, s.h.values);
    for (const auto& v : verts) EXPECT_GE(v.faces.size(), 3u);
  }
}

TEST(MeshExport, CubeObj) {
  const PolyMesh m = build_mesh(cube_normals(), vec({0, 0, 0, 1, 1, 1}));
  std::istringstream in(dump_obj(m));
  std::string line;
  int v = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) {
      ++f;
      std::istringstream ls(line.substr(2));
      int idx = 0, count = 0;
      while (ls >> idx) {
        EXPECT_GE(idx, 1);
        EXPECT_LE(idx, 8);
        ++count;
      }
      EXPECT_EQ(count, 4);
    }
  }
  EXPECT_EQ(v, 8);
  EXPECT_EQ(f, 6);
  EXPECT_EQ(dump_obj(m), dump_obj(build_mesh(cube_normals(), vec({0, 0, 0, 1, 1, 1}))));
}

TEST(MeshExport, JsonRoundTrip) {
  const Solved s = solved_random(25, 4);
  const PolyMesh m = build_mesh(s.instance.normals, s.h.values, s.instance.permutation);
  const std::string json = dump_mesh_json(m, SolverSummary{7, 1e-12, "Converged"});
  const PolyMesh back = parse_mesh_json(json);
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], m.vertices[i]);
  EXPECT_EQ(back.faces, m.faces);
  EXPECT_EQ(back.face_areas, m.face_areas);
  EXPECT_EQ(back.support, m.support);
  EXPECT_EQ(dump_mesh_json(back, SolverSummary{7, 1e-12, "Converged"}), json);
}

TEST(MeshExport, FilesystemErrorsSurface) {
  const PolyMesh m = build_mesh(cube_normals(), vec({0, 0, 0, 1, 1, 1}));
  EXPECT_THROW(export_obj(m, "/nonexistent-dir/cube.obj"), std::runtime_error);
  EXPECT_THROW(export_json(m, "/nonexistent-dir/cube.json"), std::runtime_error);
  const auto path = std::filesystem::temp_directory_path() / "minkrec_test_cube.obj";
  export_obj(m, path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), dump_obj(m));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace minkrec
