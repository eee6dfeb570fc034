#include "minkrec/instance.hpp"

#include "minkrec/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace minkrec {

namespace {

using json = nlohmann::json;

constexpr int kMaxGenerationRetries = 1000;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string() + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

UnitVec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 g(gauss(rng), gauss(rng), gauss(rng));
    if (g.squaredNorm() > 1e-24) return UnitVec3(g);
  }
}

bool spans(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::abs(det_rows(c, a, b)) > kSpanningTolerance;
}

ProblemInstance reorder(std::span<const UnitVec3> normals, std::span<const double> areas,
                        const std::array<std::size_t, 3>& triple) {
  const std::size_t n = normals.size();
  ProblemInstance out;
  out.permutation.assign(triple.begin(), triple.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(triple.begin(), triple.end(), i) == triple.end()) out.permutation.push_back(i);
  }
  out.normals.reserve(n);
  out.target_areas.resize(static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < n; ++g) {
    out.normals.push_back(normals[out.permutation[g]]);
    out.target_areas(static_cast<Eigen::Index>(g)) = areas[out.permutation[g]];
  }
  return out;
}

}  // namespace

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  if (!unit_norm.pass) out.emplace_back("unit_norm");
  if (!distinctness.pass) out.emplace_back("distinctness");
  if (!spanning.pass) out.emplace_back("spanning");
  if (!positivity.pass) out.emplace_back("positivity");
  if (!closure.pass) out.emplace_back("closure");
  return out;
}

ValidationReport validate(std::span<const UnitVec3> normals, std::span<const double> areas) {
  if (normals.size() != areas.size()) {
    throw LengthMismatch("got " + std::to_string(normals.size()) + " normals and " +
                         std::to_string(areas.size()) + " areas");
  }
  const std::size_t n = normals.size();
  if (n < 4) throw InvalidInput("at least 4 faces are required, got " + std::to_string(n));

  ValidationReport report;
  report.faces = n;

  double norm_defect = 0.0;
  for (const auto& u : normals) norm_defect = std::max(norm_defect, std::abs(u.vec().norm() - 1.0));
  report.unit_norm = {norm_defect <= UnitVec3::kNormTolerance, norm_defect};

  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      min_dist = std::min(min_dist, (normals[i].vec() - normals[j].vec()).norm());
    }
  }
  report.distinctness = {min_dist > kDistinctTolerance, min_dist};

  double best_triple = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 c = normals[i].vec().cross(normals[j].vec());
      for (std::size_t k = j + 1; k < n; ++k) {
        best_triple = std::max(best_triple, std::abs(normals[k].vec().dot(c)));
      }
    }
  }
  report.spanning = {best_triple > kSpanningTolerance, best_triple};

  double min_area = std::numeric_limits<double>::infinity();
  bool finite = true;
  Vec3 closure = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    finite = finite && std::isfinite(areas[i]);
    min_area = std::min(min_area, areas[i]);
    closure += areas[i] * normals[i].vec();
    total += areas[i];
  }
  report.positivity = {finite && min_area > 0.0, min_area};
  const double defect = closure.norm();
  report.closure = {finite && defect <= kClosureTolerance * std::abs(total), defect};
  return report;
}

Eigen::VectorXd ProblemInstance::to_user_order(const Eigen::VectorXd& gauge) const {
  Eigen::VectorXd user(gauge.size());
  for (std::size_t g = 0; g < permutation.size(); ++g) {
    user(static_cast<Eigen::Index>(permutation[g])) = gauge(static_cast<Eigen::Index>(g));
  }
  return user;
}

Eigen::VectorXd ProblemInstance::to_gauge_order(const Eigen::VectorXd& user) const {
  Eigen::VectorXd gauge(user.size());
  for (std::size_t g = 0; g < permutation.size(); ++g) {
    gauge(static_cast<Eigen::Index>(g)) = user(static_cast<Eigen::Index>(permutation[g]));
  }
  return gauge;
}

ProblemInstance gauge_order(std::span<const UnitVec3> normals, std::span<const double> areas) {
  if (normals.size() != areas.size()) throw LengthMismatch("normals and areas differ in length");
  const std::size_t n = normals.size();
  if (n < 3) throw NoSpanningTriple("fewer than three normals");

  const std::size_t first = 0;
  std::size_t second = n;
  for (std::size_t j = first + 1; j < n; ++j) {
    if (std::abs(normals[first].vec().dot(normals[j].vec())) < 1.0 - kDistinctTolerance) {
      second = j;
      break;
    }
  }
  if (second == n) throw NoSpanningTriple("all normals are parallel to the first one");

  std::size_t third = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == first || k == second) continue;
    if (spans(normals[first], normals[second], normals[k])) {
      third = k;
      break;
    }
  }
  if (third == n) throw NoSpanningTriple("normals do not span R^3");

  return reorder(normals, areas, {first, second, third});
}

ProblemInstance gauge_order(std::span<const UnitVec3> normals, std::span<const double> areas,
                            const std::array<std::size_t, 3>& triple) {
  if (normals.size() != areas.size()) throw LengthMismatch("normals and areas differ in length");
  for (std::size_t t : triple) {
    if (t >= normals.size()) throw NoSpanningTriple("gauge index out of range");
  }
  if (!spans(normals[triple[0]], normals[triple[1]], normals[triple[2]])) {
    throw NoSpanningTriple("requested gauge triple does not span R^3");
  }
  return reorder(normals, areas, triple);
}

ProblemInstance make_instance(std::span<const UnitVec3> normals, std::span<const double> areas) {
  const ValidationReport report = validate(normals, areas);
  if (!report.passed()) {
    std::string msg = "instance failed validation:";
    for (const auto& f : report.failures()) msg += " " + f;
    throw InvalidInput(msg);
  }
  return gauge_order(normals, areas);
}

std::vector<UnitVec3> sample_sphere(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<UnitVec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_direction(rng));
  return out;
}

InstanceData generate_random(std::size_t faces, std::uint64_t seed) {
  if (faces < 5) throw InvalidInput("random instances need at least 5 faces");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 0; attempt < kMaxGenerationRetries; ++attempt) {
    InstanceData data;
    data.normals.reserve(faces);
    data.areas.reserve(faces);
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i + 1 < faces; ++i) {
      data.normals.push_back(random_direction(rng));
      data.areas.push_back(1.0 - unit(rng));  // (0, 1]
      v += data.areas.back() * data.normals.back().vec();
    }
    const double len = v.norm();
    if (len < 1e-6) continue;
    const UnitVec3 last(-v / len);
    const bool duplicate = std::any_of(data.normals.begin(), data.normals.end(), [&](const UnitVec3& u) {
      return (u.vec() - last.vec()).norm() <= kDistinctTolerance;
    });
    if (duplicate) continue;
    data.normals.push_back(last);
    data.areas.push_back(len);
    if (!validate(data.normals, data.areas).passed()) continue;
    return data;
  }
  throw GenerationFailed("no valid instance after " + std::to_string(kMaxGenerationRetries) + " draws");
}

InstanceData parse_instance(std::string_view text, bool require_areas) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("normals") || !doc["normals"].is_array()) {
    throw InvalidInput("instance document needs a \"normals\" array");
  }

  InstanceData data;
  for (const auto& row : doc["normals"]) {
    if (!row.is_array() || row.size() != 3 ||
        !std::all_of(row.begin(), row.end(), [](const json& x) { return x.is_number(); })) {
      throw InvalidInput("each normal must be an array of three numbers");
    }
    data.normals.emplace_back(Vec3(row[0].get<double>(), row[1].get<double>(), row[2].get<double>()));
  }

  if (doc.contains("areas")) {
    if (!doc["areas"].is_array()) throw InvalidInput("\"areas\" must be an array");
    for (const auto& a : doc["areas"]) {
      if (!a.is_number()) throw InvalidInput("areas must be numbers");
      data.areas.push_back(a.get<double>());
    }
    if (data.areas.size() != data.normals.size()) {
      throw LengthMismatch("got " + std::to_string(data.normals.size()) + " normals and " +
                           std::to_string(data.areas.size()) + " areas");
    }
  } else if (require_areas) {
    throw InvalidInput("instance document needs an \"areas\" array");
  }
  return data;
}

InstanceData load_instance(const std::filesystem::path& path, bool require_areas) {
  return parse_instance(read_file(path), require_areas);
}

std::string dump_instance(const InstanceData& data) {
  json doc;
  doc["normals"] = json::array();
  for (const auto& u : data.normals) doc["normals"].push_back({u.x(), u.y(), u.z()});
  doc["areas"] = data.areas;
  return doc.dump(2) + "\n";
}

void save_instance(const InstanceData& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  out << dump_instance(data);
  if (!out) throw std::runtime_error("write failed for " + path.string() + ": " + std::strerror(errno));
}

}  // namespace minkrec
