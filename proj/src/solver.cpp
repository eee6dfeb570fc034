#include "minkrec/solver.hpp"

#include "minkrec/error.hpp"
#include "minkrec/jacobian.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace minkrec {

namespace {

constexpr double kDiagonalFloor = 1e-12;
constexpr double kMaxDamping = 1e30;
// Continuation stages only need to land near the path.
constexpr double kStageTolerance = 1e-6;
constexpr int kStageIterations = 50;
constexpr int kMaxStageAttempts = 1000;
constexpr double kMinPathStep = 1e-8;

// `h` is in gauge form. The gauge origin can sit far from the polyhedron,
// so `table` is built about plane_center(h) to keep the edge sums well
// conditioned.
struct Evaluation {
  SupportVector h;
  EdgeTable table;
  Eigen::VectorXd g;
};

Evaluation evaluate(const Eigen::VectorXd& free, const Eigen::VectorXd& targets, const GeometryCache& cache) {
  Evaluation e;
  e.h = SupportVector::from_free(free);
  e.table = edge_lengths(recenter(e.h, cache, plane_center(e.h, cache)), cache);
  e.g = face_areas(e.table) - targets;
  return e;
}

// A(h) is translation invariant, so its partial derivatives are the same in
// every frame, including one that moves with h.
JacobianMatrix reduced_jacobian(const Evaluation& e, const GeometryCache& cache) {
  const Eigen::MatrixXd full = area_jacobian_full(e.table, cache);
  return full.rightCols(full.cols() - 3);
}

Eigen::VectorXd equidistant_start(const ProblemInstance& instance, const GeometryCache& cache, double distance) {
  const auto n = static_cast<Eigen::Index>(cache.size());

  // Point c = sum alpha_i u_i with <u_i, c> = -D0 for the three gauge planes.
  Mat3 gram;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) gram(i, j) = cache.dot(i, j);
  }
  Vec3 alpha;
  try {
    alpha = solve3x3(gram, Vec3::Constant(-distance));
  } catch (const SingularMatrix&) {
    throw DegenerateGramSystem("gauge normals are linearly dependent");
  }
  const Vec3 center = alpha(0) * cache.normal(0) + alpha(1) * cache.normal(1) + alpha(2) * cache.normal(2);

  Eigen::VectorXd free(n - 3);
  for (Eigen::Index a = 3; a < n; ++a) free(a - 3) = distance + cache.normal(a).dot(center);

  const Eigen::VectorXd areas = face_areas(SupportVector::from_free(free), cache);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(areas(i) > 0.0)) {
      throw NonpositiveInitialArea("face " + std::to_string(i) + " has zero area at the equidistant start");
    }
  }

  // Areas are homogeneous of degree two in h.
  const double scale = std::sqrt((instance.target_areas.array() / areas.array()).mean());
  return scale * free;
}

// Trial points may wander out of the well-behaved region; a failed
// evaluation there just counts as a rejected step.
std::optional<Evaluation> try_evaluate(const Eigen::VectorXd& free, const Eigen::VectorXd& targets,
                                       const GeometryCache& cache) {
  if (!free.allFinite()) return std::nullopt;
  try {
    return evaluate(free, targets, cache);
  } catch (const UnboundedEdge&) {
  } catch (const InternalError&) {
  }
  return std::nullopt;
}

// A dead face has a zero Jacobian row and no way back.
bool has_dead_face(const Evaluation& e, const Eigen::VectorXd& targets) {
  return ((e.g + targets).array() <= 0.0).any();
}

struct LmRun {
  Eigen::VectorXd x;
  Evaluation current;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  std::vector<double> history;
};

// Levenberg-Marquardt on free -> A(0, 0, 0, free) - targets, starting from an
// already evaluated point. With `keep_alive`, steps that kill a face are
// rejected like steps that increase the residual.
LmRun levenberg_marquardt(Eigen::VectorXd x, Evaluation start, const Eigen::VectorXd& targets, double tolerance,
                          int max_iterations, bool keep_alive, const GeometryCache& cache,
                          const SolveOptions& opts) {
  LmRun run;
  run.current = std::move(start);
  double norm = run.current.g.norm();
  run.history.push_back(norm);
  double damping = opts.initial_damping;

  auto finish = [&](SolveStatus status) {
    run.x = std::move(x);
    run.status = status;
    return std::move(run);
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    if (run.current.g.lpNorm<Eigen::Infinity>() <= tolerance) return finish(SolveStatus::Converged);

    const JacobianMatrix jac = reduced_jacobian(run.current, cache);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtg = jac.transpose() * run.current.g;
    const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(kDiagonalFloor);

    for (;;) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += damping * diag;
      const Eigen::VectorXd step = lhs.ldlt().solve(-jtg);
      const Eigen::VectorXd trial = x + step;

      auto next = try_evaluate(trial, targets, cache);
      if (next && keep_alive && has_dead_face(*next, targets)) next.reset();
      if (next && next->g.norm() < norm) {
        x = trial;
        run.current = std::move(*next);
        norm = run.current.g.norm();
        run.history.push_back(norm);
        run.iterations = iter + 1;
        damping /= opts.damping_decrease;
        if (step.norm() <= opts.step_tolerance * (1.0 + x.norm()) &&
            run.current.g.lpNorm<Eigen::Infinity>() > tolerance) {
          return finish(SolveStatus::StalledStep);
        }
        break;
      }
      damping *= opts.damping_increase;
      if (damping > kMaxDamping) return finish(SolveStatus::StalledStep);
    }
  }
  if (run.current.g.lpNorm<Eigen::Infinity>() <= tolerance) return finish(SolveStatus::Converged);
  return finish(SolveStatus::MaxIterations);
}

// Tracks the roots of A(h~) = (1 - t) A_start + t A0 from t = 0, where the
// starting point is an exact root, to t = 1. Every intermediate target is a
// positive closing area vector, so the path exists with all faces alive.
// The last stage is a full LM run on the true targets.
LmRun continuation(const Eigen::VectorXd& x0, const Evaluation& start, const ProblemInstance& instance,
                   double tolerance, const GeometryCache& cache, const SolveOptions& opts, int& total_iterations) {
  const Eigen::VectorXd& final_targets = instance.target_areas;
  const Eigen::VectorXd start_areas = start.g + final_targets;

  Eigen::VectorXd x = x0;
  Eigen::VectorXd x_prev = x0;
  double t = 0.0;
  double t_prev = 0.0;
  double dt = 0.25;
  LmRun last;
  last.x = x0;
  last.current = start;
  last.status = SolveStatus::StalledStep;

  for (int attempt = 0; attempt < kMaxStageAttempts && dt >= kMinPathStep; ++attempt) {
    const double t_next = std::min(1.0, t + dt);
    const bool final_stage = t_next >= 1.0;
    const Eigen::VectorXd targets = (1.0 - t_next) * start_areas + t_next * final_targets;

    // Secant predictor along the path, falling back to the last point.
    std::optional<Evaluation> guess;
    Eigen::VectorXd guess_x = x;
    if (t > t_prev) {
      guess_x = x + (x - x_prev) * ((t_next - t) / (t - t_prev));
      guess = try_evaluate(guess_x, targets, cache);
      if (guess && has_dead_face(*guess, targets)) guess.reset();
    }
    if (!guess) {
      guess_x = x;
      guess = try_evaluate(guess_x, targets, cache);
    }
    if (!guess) break;

    const double stage_tol =
        final_stage ? tolerance : std::max(opts.residual_tolerance, kStageTolerance) * targets.mean();
    LmRun stage = levenberg_marquardt(guess_x, std::move(*guess), targets, stage_tol,
                                      final_stage ? opts.max_iterations : kStageIterations, true, cache, opts);
    total_iterations += stage.iterations;

    if (stage.status == SolveStatus::Converged) {
      if (final_stage) return stage;
      x_prev = x;
      t_prev = t;
      x = stage.x;
      t = t_next;
      dt = std::min(2.0 * dt, 0.5);
    } else {
      if (final_stage) last = std::move(stage);
      dt *= 0.5;
    }
  }
  return last;
}

}  // namespace

void SolveOptions::check() const {
  if (max_iterations <= 0) throw InvalidInput("max_iterations must be positive");
  if (!(residual_tolerance > 0.0)) throw InvalidInput("residual_tolerance must be positive");
  if (!(step_tolerance > 0.0)) throw InvalidInput("step_tolerance must be positive");
  if (!(initial_damping > 0.0)) throw InvalidInput("initial_damping must be positive");
  if (!(damping_increase > 1.0) || !(damping_decrease > 1.0)) {
    throw InvalidInput("damping factors must exceed 1");
  }
  if (!(initial_distance > 0.0)) throw InvalidInput("initial_distance must be positive");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "Converged";
    case SolveStatus::MaxIterations:
      return "MaxIterations";
    case SolveStatus::StalledStep:
      return "StalledStep";
    case SolveStatus::UnboundedEdge:
      return "UnboundedEdge";
  }
  return "Unknown";
}

Eigen::VectorXd initial_guess(const ProblemInstance& instance, const GeometryCache& cache,
                              const SolveOptions& opts) {
  opts.check();
  return equidistant_start(instance, cache, opts.initial_distance);
}

SolveResult solve(const ProblemInstance& instance, const GeometryCache& cache, const SolveOptions& opts) {
  opts.check();
  const Eigen::VectorXd& targets = instance.target_areas;
  const double tolerance = opts.residual_tolerance * targets.mean();

  SolveResult result;
  const Eigen::VectorXd x0 = equidistant_start(instance, cache, opts.initial_distance);

  Evaluation start;
  try {
    start = evaluate(x0, targets, cache);
  } catch (const UnboundedEdge&) {
    result.h_star = SupportVector::from_free(x0);
    result.status = SolveStatus::UnboundedEdge;
    result.final_residual_inf = std::numeric_limits<double>::infinity();
    return result;
  }

  LmRun run = levenberg_marquardt(x0, start, targets, tolerance, opts.max_iterations, false, cache, opts);
  int iterations = run.iterations;
  if (run.status != SolveStatus::Converged && opts.continuation) {
    LmRun tracked = continuation(x0, start, instance, tolerance, cache, opts, iterations);
    if (tracked.status == SolveStatus::Converged ||
        tracked.current.g.lpNorm<Eigen::Infinity>() < run.current.g.lpNorm<Eigen::Infinity>()) {
      run = std::move(tracked);
    }
  }

  result.h_star = run.current.h;
  result.iterations = iterations;
  result.final_residual_inf = run.current.g.lpNorm<Eigen::Infinity>();
  result.status = run.status;
  result.accepted_residual_norms = std::move(run.history);
  return result;
}

}  // namespace minkrec
