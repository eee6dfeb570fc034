#pragma once

#include "minkrec/areas.hpp"
#include "minkrec/geom.hpp"
#include "minkrec/instance.hpp"

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace minkrec {

struct SolveOptions {
  int max_iterations = 200;
  /// Converged once ||A - A0||_inf <= residual_tolerance * mean(A0).
  double residual_tolerance = 1e-10;
  /// Stalled once an accepted step satisfies ||delta|| <= step_tolerance * (1 + ||h~||).
  double step_tolerance = 1e-12;
  double initial_damping = 1e-3;
  double damping_increase = 10.0;
  double damping_decrease = 10.0;
  /// Initial distance of every plane from the equidistant point.
  double initial_distance = 1.0;
  /// When the direct run fails, track the roots for targets moving from the
  /// initial guess's areas to A0, rejecting steps that kill a face.
  bool continuation = true;

  /// Throws InvalidInput when a field is out of range.
  void check() const;
};

enum class SolveStatus { Converged, MaxIterations, StalledStep, UnboundedEdge };

std::string_view to_string(SolveStatus status);

struct SolveResult {
  /// Gauge form: length F with h_1 = h_2 = h_3 = 0.
  SupportVector h_star;
  /// Accepted LM steps, summed over all runs.
  int iterations = 0;
  double final_residual_inf = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  /// ||A - A0||_2 at the start of the final LM run and after each of its
  /// accepted steps.
  std::vector<double> accepted_residual_norms;
};

/// Free support values of the polyhedron whose planes are all at the same
/// distance D from a common interior point, with D chosen so that the
/// resulting areas match the targets on average.
///
/// Throws DegenerateGramSystem or NonpositiveInitialArea.
Eigen::VectorXd initial_guess(const ProblemInstance& instance, const GeometryCache& cache,
                              const SolveOptions& opts = {});

/// Damped Gauss-Newton (Levenberg-Marquardt) root finding on
/// h~ -> A(0, 0, 0, h~) - A0 with the analytic Jacobian.
SolveResult solve(const ProblemInstance& instance, const GeometryCache& cache, const SolveOptions& opts = {});

}  // namespace minkrec
