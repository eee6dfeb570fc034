#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace minkrec::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kNumericFailure = 1, kInputFailure = 2 };

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string output;
  std::string format;  // "obj" or "json"; empty means infer from the output extension
  std::size_t faces = 25;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
  std::optional<int> max_iterations;
  std::vector<double> support;
  double step = 1e-6;
  bool json = false;
  int verbosity = 0;
};

/// Runs one `minkrec` invocation and returns its exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_areas(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check_jacobian(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace minkrec::cli
