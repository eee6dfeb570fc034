// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include "minkrec/areas.hpp"
#include "minkrec/error.hpp"
#include "minkrec/geom.hpp"
#include "minkrec/instance.hpp"
#include "minkrec/jacobian.hpp"
#include "minkrec/mesh.hpp"
#include "minkrec/solver.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace mk = minkrec;
namespace ref = minkrec::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// max_i |A_i - A0_i| / A0_i, from the mesh rather than the edge sums.
double oracle_error(const mk::ProblemInstance& p, const mk::SupportVector& h) {
  const Eigen::VectorXd m = ref::mesh_areas(p.normals, h.values);
  return ((m - p.target_areas).array().abs() / p.target_areas.array()).maxCoeff();
}

Outcome cube_closed_form() {
  const auto t0 = Clock::now();
  const std::vector<double> areas(6, 1.0);
  const mk::ProblemInstance p = mk::make_instance(ref::cube_normals(), areas);
  const mk::GeometryCache c(p.normals);
  const Eigen::VectorXd guess = mk::initial_guess(p, c);
  const mk::SolveResult r = mk::solve(p, c);
  const mk::PolyMesh m = mk::build_mesh(p.normals, r.h_star.values, p.permutation);
  const double elapsed = seconds_since(t0);

  const double guess_err = (guess - ref::vec({1, 1, 1})).cwiseAbs().maxCoeff();
  const auto faces = std::count_if(m.faces.begin(), m.faces.end(), [](const auto& f) { return !f.empty(); });
  const Eigen::VectorXd mesh_areas = mk::mesh_face_areas(m);
  const double area_err = (mesh_areas - Eigen::VectorXd::Ones(6)).cwiseAbs().maxCoeff();

  std::ostringstream s;
  s << "guess_err=" << guess_err << " status=" << mk::to_string(r.status) << " residual=" << r.final_residual_inf
    << " V=" << m.vertices.size() << " E=" << mk::edge_count(m) << " F=" << faces << " time=" << elapsed << "s";
  const bool pass = guess_err <= 1e-12 && r.status == mk::SolveStatus::Converged && r.final_residual_inf <= 1e-12 &&
                    m.vertices.size() == 8 && mk::edge_count(m) == 12 && faces == 6 && area_err <= 1e-12 &&
                    elapsed < 0.1;
  return {pass, s.str()};
}

Outcome random_reconstruction() {
  int runs = 0;
  int good = 0;
  int converged_but_wrong = 0;
  double slowest = 0.0;
  double worst_good = 0.0;
  std::string failures;
  for (std::size_t f : {25u, 50u, 100u}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ++runs;
      const auto t0 = Clock::now();
      const mk::InstanceData d = mk::generate_random(f, seed);
      const mk::ProblemInstance p = mk::make_instance(d.normals, d.areas);
      const mk::GeometryCache c(p.normals);
      const mk::SolveResult r = mk::solve(p, c);
      double err = INFINITY;
      try {
        err = oracle_error(p, r.h_star);
      } catch (const mk::Error&) {
      }
      const double elapsed = seconds_since(t0);
      slowest = std::max(slowest, elapsed);
      const bool converged = r.status == mk::SolveStatus::Converged;
      if (converged && err > 1e-5) ++converged_but_wrong;
      if (converged && err <= 1e-6 && elapsed < 30.0) {
        ++good;
        worst_good = std::max(worst_good, err);
      } else {
        failures += " F" + std::to_string(f) + "/s" + std::to_string(seed) + ":" + std::string(mk::to_string(r.status));
      }
    }
  }
  std::ostringstream s;
  s << good << "/" << runs << " converged within 1e-6 (worst " << worst_good << "), converged_but_wrong="
    << converged_but_wrong << " slowest=" << slowest << "s" << failures;
  return {good >= 0.95 * runs && converged_but_wrong == 0 && slowest < 30.0, s.str()};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  int samples = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t f = 5 + static_cast<std::size_t>(k % 8);
    const mk::InstanceData d = mk::generate_random(f, 1000 + static_cast<std::uint64_t>(k));
    const mk::ProblemInstance p = mk::make_instance(d.normals, d.areas);
    const mk::GeometryCache c(p.normals);
    const mk::SupportVector h = mk::SupportVector::from_free(mk::initial_guess(p, c));
    const Eigen::VectorXd a = mk::face_areas(h, c);
    const Eigen::VectorXd m = ref::mesh_areas(p.normals, h.values);
    worst = std::max(worst, ref::max_rel_diff(a, m));
    ++samples;
  }
  std::ostringstream s;
  s << samples << " instances, F in 5..12, max per-face relative deviation " << worst;
  return {worst <= 1e-9, s.str()};
}

Outcome jacobian_correctness() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  int samples = 0;
  int rejected = 0;
  int bad_entries = 0;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; samples < 50; ++seed) {
    const std::size_t f = 6 + static_cast<std::size_t>(seed % 15);
    const mk::InstanceData d = mk::generate_random(f, 5000 + seed);
    const mk::ProblemInstance p = mk::make_instance(d.normals, d.areas);
    const mk::GeometryCache c(p.normals);
    Eigen::VectorXd free = mk::initial_guess(p, c);
    const double scale = free.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < free.size(); ++i) free(i) += jitter(rng) * scale;
    const mk::SupportVector h = mk::SupportVector::from_free(free);
    mk::EdgeTable t;
    try {
      t = mk::edge_lengths(h, c);
    } catch (const mk::Error&) {
      ++rejected;
      continue;
    }
    if (mk::kink_margin(t, c).margin <= 1e-7) {
      ++rejected;
      continue;
    }
    const Eigen::MatrixXd j = mk::jacobian(h, t, c);
    const Eigen::MatrixXd fd = ref::central_differences(c, free, 1e-6);
    for (Eigen::Index r = 0; r < j.rows(); ++r) {
      for (Eigen::Index b = 0; b < j.cols(); ++b) {
        const double allowed = std::max(1e-5 * std::abs(fd(r, b)), 1e-7);
        const double dev = std::abs(j(r, b) - fd(r, b));
        worst_ratio = std::max(worst_ratio, dev / allowed);
        if (dev > allowed) ++bad_entries;
      }
    }
    ++samples;
  }
  std::ostringstream s;
  s << samples << " samples (" << rejected << " redrawn), entries out of tolerance=" << bad_entries
    << ", worst deviation/allowed=" << worst_ratio;
  return {bad_entries == 0, s.str()};
}

Outcome zero_triple_branch() {
  // Cube [-1, 1]^3 with x + y <= 1.2 sqrt2: the diagonal plane is parallel to
  // the (+x, +y) edge and removes it entirely.
  const auto n = ref::seven_normals();
  const mk::GeometryCache c(n);
  const Eigen::VectorXd h = ref::vec({1, 1, 1, 1, 1, 1, 1.2});
  const mk::EdgeTable t = mk::edge_lengths(mk::SupportVector(h), c);
  const Eigen::VectorXd correct = mk::face_areas(t);
  const Eigen::VectorXd naive = ref::naive_face_areas(n, h);
  const Eigen::VectorXd oracle = ref::mesh_areas(n, h);
  const double correct_dev = ref::max_rel_diff(correct, oracle);
  const double naive_dev = (naive - oracle).cwiseAbs().maxCoeff();
  std::ostringstream s;
  s << "a=" << c.triple(6, 0, 1) << " lambda_12=" << t.lambda(0, 1) << " killed_by=" << t.killed_by_zero_a(0, 1)
    << " |A-mesh|rel=" << correct_dev << " |naive-mesh|=" << naive_dev;
  const bool pass = t.lambda(0, 1) == 0.0 && t.killed_by_zero_a(0, 1) == 6 && correct_dev <= 1e-12 && naive_dev > 1e-3;
  return {pass, s.str()};
}

Outcome dead_face() {
  const auto n = ref::seven_normals();
  const mk::GeometryCache c(n);
  bool pass = true;
  double worst_row = 0.0;
  double worst_area = 0.0;
  for (double h7 : {1e-3, 0.5, 2.0, 100.0}) {
    const mk::SupportVector h = mk::SupportVector::from_free(ref::vec({1, 1, 1, h7}));
    const mk::EdgeTable t = mk::edge_lengths(h, c);
    const double a7 = mk::face_areas(t)(6);
    const Eigen::MatrixXd j = mk::jacobian(h, t, c);
    worst_area = std::max(worst_area, std::abs(a7));
    worst_row = std::max(worst_row, j.row(6).cwiseAbs().maxCoeff());
    const mk::PolyMesh m = mk::build_mesh(n, h.values);
    pass = pass && a7 == 0.0 && j.row(6).isZero(0.0) && m.faces[6].empty();
  }
  std::ostringstream s;
  s << "h7 in {1e-3, 0.5, 2, 100}: max|A_7|=" << worst_area << " max|J row 7|=" << worst_row;
  return {pass, s.str()};
}

Outcome properties() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  bool symmetric = true;
  double homog = 0.0, transl = 0.0, closure = 0.0;
  bool euler = true, contained = true;
  int samples = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t f = 5 + static_cast<std::size_t>(seed % 26);
    const mk::InstanceData d = mk::generate_random(f, 9000 + seed);
    const mk::GeometryCache c(d.normals);
    const Eigen::VectorXd hv = ref::random_feasible_h(d.normals, rng);
    const mk::SupportVector h(hv);
    const mk::EdgeTable t = mk::edge_lengths(h, c);
    symmetric = symmetric && t.lambda == t.lambda.transpose();

    const Eigen::VectorXd a = mk::face_areas(t);
    const double alpha = 0.25 + 4.0 * std::abs(g(rng));
    const Eigen::VectorXd scaled = mk::face_areas(mk::SupportVector(alpha * hv), c);
    homog = std::max(homog, (scaled - alpha * alpha * a).cwiseAbs().maxCoeff() / (alpha * alpha * a.maxCoeff()));
    const Eigen::VectorXd moved = mk::face_areas(mk::recenter(h, c, mk::Vec3(g(rng), g(rng), g(rng))), c);
    transl = std::max(transl, (moved - a).cwiseAbs().maxCoeff() / a.maxCoeff());

    const mk::PolyMesh m = mk::build_mesh(d.normals, hv);
    mk::Vec3 sum = mk::Vec3::Zero();
    for (std::size_t i = 0; i < f; ++i) sum += m.face_areas(static_cast<Eigen::Index>(i)) * d.normals[i].vec();
    closure = std::max(closure, sum.norm() / m.face_areas.sum());
    euler = euler && mk::euler_characteristic(m) == 2;
    for (const mk::Vec3& v : m.vertices)
      for (std::size_t i = 0; i < f; ++i) {
        const double hi = hv(static_cast<Eigen::Index>(i));
        contained = contained && d.normals[i].vec().dot(v) <= hi + 1e-8 * (1.0 + std::abs(hi));
      }
    ++samples;
  }
  std::ostringstream s;
  s << samples << " samples: lambda_symmetric=" << symmetric << " homogeneity=" << homog
    << " translation=" << transl << " closure=" << closure << " euler2=" << euler << " contained=" << contained;
  return {symmetric && homog <= 1e-10 && transl <= 1e-9 && closure <= 1e-8 && euler && contained, s.str()};
}

// Indices of a spanning triple found by scanning from the end of the list.
std::array<std::size_t, 3> last_spanning_triple(const std::vector<mk::UnitVec3>& n) {
  const std::size_t f = n.size();
  const std::size_t i = f - 1;
  std::size_t j = i;
  while (j-- > 0)
    if (std::abs(n[i].vec().dot(n[j].vec())) < 1.0 - 1e-9) break;
  std::size_t k = j;
  while (k-- > 0)
    if (std::abs(mk::det_rows(n[k], n[i], n[j])) > 1e-9) break;
  return {i, j, k};
}

Outcome gauge_invariance() {
  double worst = 0.0;
  bool pass = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const mk::InstanceData d = mk::generate_random(25, seed);
    const mk::ProblemInstance p1 = mk::gauge_order(d.normals, d.areas);
    const mk::ProblemInstance p2 = mk::gauge_order(d.normals, d.areas, last_spanning_triple(d.normals));
    if (p1.permutation == p2.permutation) return {false, "second gauge triple coincides with the first"};
    std::vector<mk::PolyMesh> meshes;
    for (const auto* p : {&p1, &p2}) {
      const mk::GeometryCache c(p->normals);
      const mk::SolveResult r = mk::solve(*p, c);
      pass = pass && r.status == mk::SolveStatus::Converged;
      meshes.push_back(mk::build_mesh(p->normals, r.h_star.values, p->permutation));
    }
    auto centered = [](const mk::PolyMesh& m) {
      mk::Vec3 mean = mk::Vec3::Zero();
      for (const auto& v : m.vertices) mean += v;
      mean /= static_cast<double>(m.vertices.size());
      std::vector<mk::Vec3> out;
      for (const auto& v : m.vertices) out.push_back(v - mean);
      return out;
    };
    const auto a = centered(meshes[0]);
    const auto b = centered(meshes[1]);
    if (a.size() != b.size()) {
      pass = false;
      continue;
    }
    for (const auto& va : a) {
      double best = INFINITY;
      for (const auto& vb : b) best = std::min(best, (va - vb).norm());
      worst = std::max(worst, best);
    }
  }
  std::ostringstream s;
  s << "5 instances F=25, max vertex distance after centering " << worst;
  return {pass && worst <= 1e-6, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 cube closed form", cube_closed_form},
      {"AC2 random reconstructions F=25/50/100, seeds 1..20", random_reconstruction},
      {"AC3 edge-sum areas match mesh oracle", oracle_equivalence},
      {"AC4 analytic Jacobian matches central differences", jacobian_correctness},
      {"AC5 a=0 branch changes the areas", zero_triple_branch},
      {"AC6 dead face has zero area and zero Jacobian row", dead_face},
      {"AC7 property suites", properties},
      {"AC8 shape independent of gauge triple", gauge_invariance},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
