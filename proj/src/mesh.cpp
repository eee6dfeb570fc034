#include "minkrec/mesh.hpp"

#include "minkrec/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace minkrec {

namespace {

using json = nlohmann::json;

double plane_slack(double h) { return kContainmentTolerance * (1.0 + std::abs(h)); }

// Orthonormal (e1, e2) with e1 x e2 = u, seeded from the coordinate axis
// least aligned with u.
std::pair<Vec3, Vec3> plane_basis(const Vec3& u) {
  Eigen::Index axis = 0;
  u.cwiseAbs().minCoeff(&axis);
  Vec3 seed = Vec3::Unit(axis);
  const Vec3 e1 = (seed - seed.dot(u) * u).normalized();
  return {e1, u.cross(e1)};
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string() + ": " + std::strerror(errno));
}

void check_full_dimensional(const std::vector<MeshVertex>& verts) {
  if (verts.size() < 4) throw DegenerateMesh("polyhedron has fewer than 4 vertices");
  const Vec3& p0 = verts[0].point;
  auto farthest = [&](auto&& dist) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const double d = dist(verts[i].point);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return std::pair{best, best_d};
  };
  const auto [i1, diam] = farthest([&](const Vec3& p) { return (p - p0).norm(); });
  const double tol = 1e-9 * (1.0 + diam);
  if (diam <= tol) throw DegenerateMesh("polyhedron collapses to a point");
  const Vec3 dir = (verts[i1].point - p0).normalized();
  const auto [i2, off_line] = farthest([&](const Vec3& p) { return (p - p0 - (p - p0).dot(dir) * dir).norm(); });
  if (off_line <= tol) throw DegenerateMesh("polyhedron collapses to a segment");
  const Vec3 normal = dir.cross(verts[i2].point - p0).normalized();
  const auto off_plane = farthest([&](const Vec3& p) { return std::abs((p - p0).dot(normal)); }).second;
  if (off_plane <= tol) throw DegenerateMesh("polyhedron collapses to a polygon");
}

}  // namespace

std::vector<MeshVertex> enumerate_vertices(std::span<const UnitVec3> normals, const Eigen::VectorXd& h) {
  const std::size_t n = normals.size();
  if (static_cast<std::size_t>(h.size()) != n) throw LengthMismatch("support vector does not match normals");

  auto inside = [&](const Vec3& p) {
    for (std::size_t m = 0; m < n; ++m) {
      if (normals[m].vec().dot(p) > h(m) + plane_slack(h(m))) return false;
    }
    return true;
  };

  std::vector<MeshVertex> verts;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3& a = normals[i].vec();
        const Vec3& b = normals[j].vec();
        const Vec3& c = normals[k].vec();
        if (std::abs(det_rows(a, b, c)) <= 1e-12) continue;
        Mat3 m;
        m.row(0) = a.transpose();
        m.row(1) = b.transpose();
        m.row(2) = c.transpose();
        const Vec3 p = solve3x3(m, Vec3(h(i), h(j), h(k)));
        if (!inside(p)) continue;

        auto same = std::find_if(verts.begin(), verts.end(), [&](const MeshVertex& v) {
          return (v.point - p).norm() <= kVertexMergeTolerance * (1.0 + v.point.norm());
        });
        if (same == verts.end()) {
          verts.push_back({p, {i, j, k}});
        } else {
          same->faces.insert(same->faces.end(), {i, j, k});
        }
      }
    }
  }

  for (auto& v : verts) {
    for (std::size_t m = 0; m < n; ++m) {
      if (std::abs(normals[m].vec().dot(v.point) - h(m)) <= plane_slack(h(m))) v.faces.push_back(m);
    }
    std::sort(v.faces.begin(), v.faces.end());
    v.faces.erase(std::unique(v.faces.begin(), v.faces.end()), v.faces.end());
  }
  return verts;
}

PolyMesh build_mesh(std::span<const UnitVec3> normals, const Eigen::VectorXd& h,
                    std::span<const std::size_t> permutation) {
  const std::size_t n = normals.size();
  if (permutation.size() != n) throw LengthMismatch("permutation does not match normals");

  const std::vector<MeshVertex> verts = enumerate_vertices(normals, h);
  check_full_dimensional(verts);

  PolyMesh mesh;
  mesh.vertices.reserve(verts.size());
  for (const auto& v : verts) mesh.vertices.push_back(v.point);

  std::vector<std::vector<std::size_t>> cycles(n);
  for (std::size_t f = 0; f < n; ++f) {
    std::vector<std::size_t> ids;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (std::binary_search(verts[v].faces.begin(), verts[v].faces.end(), f)) ids.push_back(v);
    }
    if (ids.size() < 3) continue;  // plane touches P in a point or an edge

    const Vec3& u = normals[f].vec();
    Vec3 centroid = Vec3::Zero();
    for (auto v : ids) centroid += mesh.vertices[v];
    centroid /= static_cast<double>(ids.size());

    const auto [e1, e2] = plane_basis(u);
    std::vector<std::pair<double, std::size_t>> by_angle;
    double spread = 0.0;
    for (auto v : ids) {
      const Vec3 d = mesh.vertices[v] - centroid;
      by_angle.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), v);
      spread = std::max(spread, d.norm());
    }
    std::sort(by_angle.begin(), by_angle.end());

    std::vector<std::size_t> cycle;
    for (const auto& [angle, v] : by_angle) cycle.push_back(v);

    Vec3 area_vec = Vec3::Zero();
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      area_vec += mesh.vertices[cycle[t]].cross(mesh.vertices[cycle[(t + 1) % cycle.size()]]);
    }
    if (0.5 * area_vec.norm() <= 1e-12 * (1.0 + spread * spread)) {
      throw DegenerateMesh("face " + std::to_string(permutation[f]) + " has collinear vertices");
    }
    cycles[f] = std::move(cycle);
  }

  mesh.faces.resize(n);
  mesh.support.resize(static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g) {
    mesh.faces[permutation[g]] = std::move(cycles[g]);
    mesh.support(static_cast<Eigen::Index>(permutation[g])) = h(static_cast<Eigen::Index>(g));
  }
  mesh.face_normals.assign(n, normals[0]);
  for (std::size_t g = 0; g < n; ++g) mesh.face_normals[permutation[g]] = normals[g];
  mesh.face_areas = mesh_face_areas(mesh);
  return mesh;
}

PolyMesh build_mesh(std::span<const UnitVec3> normals, const Eigen::VectorXd& h) {
  std::vector<std::size_t> identity(normals.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return build_mesh(normals, h, identity);
}

Eigen::VectorXd mesh_face_areas(const PolyMesh& mesh) {
  Eigen::VectorXd areas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.faces.size()));
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& cycle = mesh.faces[f];
    if (cycle.size() < 3) continue;
    // Fan around the face centroid so the cross products stay small.
    Vec3 centroid = Vec3::Zero();
    for (std::size_t v : cycle) centroid += mesh.vertices[v];
    centroid /= static_cast<double>(cycle.size());
    Vec3 sum = Vec3::Zero();
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      sum += (mesh.vertices[cycle[t]] - centroid).cross(mesh.vertices[cycle[(t + 1) % cycle.size()]] - centroid);
    }
    areas(static_cast<Eigen::Index>(f)) = 0.5 * sum.norm();
  }
  return areas;
}

std::size_t edge_count(const PolyMesh& mesh) {
  std::size_t total = 0;
  for (const auto& c : mesh.faces) total += c.size();
  return total / 2;
}

long euler_characteristic(const PolyMesh& mesh) {
  const auto nonempty = std::count_if(mesh.faces.begin(), mesh.faces.end(), [](const auto& c) { return !c.empty(); });
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edge_count(mesh)) + static_cast<long>(nonempty);
}

std::string dump_obj(const PolyMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# minkrec reconstruction: " << mesh.vertices.size() << " vertices\n";
  // Adding 0.0 turns -0 into 0.
  for (const auto& v : mesh.vertices) out << "v " << v.x() + 0.0 << ' ' << v.y() + 0.0 << ' ' << v.z() + 0.0 << '\n';
  for (const auto& cycle : mesh.faces) {
    if (cycle.empty()) continue;
    out << 'f';
    for (auto idx : cycle) out << ' ' << idx + 1;
    out << '\n';
  }
  return out.str();
}

std::string dump_mesh_json(const PolyMesh& mesh, const std::optional<SolverSummary>& solver) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : mesh.vertices) doc["vertices"].push_back({v.x(), v.y(), v.z()});
  doc["faces"] = mesh.faces;
  doc["normals"] = json::array();
  for (const auto& u : mesh.face_normals) doc["normals"].push_back({u.x(), u.y(), u.z()});
  doc["areas"] = std::vector<double>(mesh.face_areas.data(), mesh.face_areas.data() + mesh.face_areas.size());
  doc["support"] = std::vector<double>(mesh.support.data(), mesh.support.data() + mesh.support.size());
  if (solver) {
    doc["solver"] = {{"iterations", solver->iterations}, {"residual", solver->residual}, {"status", solver->status}};
  }
  return doc.dump(2) + "\n";
}

PolyMesh parse_mesh_json(std::string_view text) {
  PolyMesh mesh;
  try {
    const json doc = json::parse(text);
    for (const auto& v : doc.at("vertices")) {
      mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    }
    mesh.faces = doc.at("faces").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& u : doc.at("normals")) {
      mesh.face_normals.emplace_back(Vec3(u.at(0).get<double>(), u.at(1).get<double>(), u.at(2).get<double>()));
    }
    const auto areas = doc.at("areas").get<std::vector<double>>();
    const auto support = doc.at("support").get<std::vector<double>>();
    mesh.face_areas = Eigen::Map<const Eigen::VectorXd>(areas.data(), static_cast<Eigen::Index>(areas.size()));
    mesh.support = Eigen::Map<const Eigen::VectorXd>(support.data(), static_cast<Eigen::Index>(support.size()));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed mesh document: ") + e.what());
  }
  return mesh;
}

void export_obj(const PolyMesh& mesh, const std::filesystem::path& path) { write_text(dump_obj(mesh), path); }

void export_json(const PolyMesh& mesh, const std::filesystem::path& path, const std::optional<SolverSummary>& solver) {
  write_text(dump_mesh_json(mesh, solver), path);
}

}  // namespace minkrec
