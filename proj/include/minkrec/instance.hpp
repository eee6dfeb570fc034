#pragma once

#include "minkrec/geom.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minkrec {

inline constexpr double kClosureTolerance = 1e-9;      // relative to sum of areas
inline constexpr double kDistinctTolerance = 1e-9;     // on ||u_i - u_j||
inline constexpr double kSpanningTolerance = 1e-9;     // on |<u_k, u_i x u_j>|

/// Outcome of one hypothesis check together with the measured quantity.
struct CheckResult {
  bool pass = false;
  double measured = 0.0;
};

/// Checks of a (normals, areas) pair against the hypotheses of Minkowski's
/// theorem.
///
///   unit_norm    : max | ||u_i|| - 1 |
///   distinctness : min ||u_i - u_j|| over pairs
///   spanning     : max |<u_k, u_i x u_j>| over triples
///   positivity   : min A_i
///   closure      : || sum_i A_i u_i ||
struct ValidationReport {
  std::size_t faces = 0;
  CheckResult unit_norm;
  CheckResult distinctness;
  CheckResult spanning;
  CheckResult positivity;
  CheckResult closure;

  bool passed() const {
    return unit_norm.pass && distinctness.pass && spanning.pass && positivity.pass && closure.pass;
  }

  /// Names of the failed checks, in the field order above.
  std::vector<std::string> failures() const;
};

ValidationReport validate(std::span<const UnitVec3> normals, std::span<const double> areas);

/// A validated problem with normals reordered so that the first three span R^3.
///
/// `permutation[g]` is the user (input) index of the face stored at gauge
/// position g.
struct ProblemInstance {
  std::vector<UnitVec3> normals;
  Eigen::VectorXd target_areas;
  std::vector<std::size_t> permutation;

  std::size_t size() const { return normals.size(); }

  /// Maps a per-face vector from gauge order back to user order.
  Eigen::VectorXd to_user_order(const Eigen::VectorXd& gauge) const;
  /// Maps a per-face vector from user order into gauge order.
  Eigen::VectorXd to_gauge_order(const Eigen::VectorXd& user) const;
};

/// Picks the earliest spanning triple (first normal, then the first one not
/// parallel to it, then the first one off their plane) and moves it to the
/// front. Remaining faces keep their relative order.
ProblemInstance gauge_order(std::span<const UnitVec3> normals, std::span<const double> areas);

/// Same as above with an explicitly chosen gauge triple (user indices).
ProblemInstance gauge_order(std::span<const UnitVec3> normals, std::span<const double> areas,
                            const std::array<std::size_t, 3>& triple);

/// validate() followed by gauge_order(); throws InvalidInput listing the
/// failed checks.
ProblemInstance make_instance(std::span<const UnitVec3> normals, std::span<const double> areas);

/// Raw normals and areas as read from or written to an instance document.
struct InstanceData {
  std::vector<UnitVec3> normals;
  std::vector<double> areas;
};

/// F - 1 normals uniform on the sphere, F - 1 areas uniform on (0, 1], and a
/// closing face u_F = -v/|v|, A_F = |v| with v = sum_{i<F} A_i u_i.
InstanceData generate_random(std::size_t faces, std::uint64_t seed);

/// n i.i.d. uniform samples on the unit sphere (normalized Gaussian draws).
std::vector<UnitVec3> sample_sphere(std::size_t n, std::uint64_t seed);

/// Parses `{"normals": [[x,y,z],...], "areas": [a,...]}`. `areas` may be
/// omitted when `require_areas` is false. Throws InvalidInput.
InstanceData parse_instance(std::string_view text, bool require_areas = true);
InstanceData load_instance(const std::filesystem::path& path, bool require_areas = true);

std::string dump_instance(const InstanceData& data);
void save_instance(const InstanceData& data, const std::filesystem::path& path);

}  // namespace minkrec
