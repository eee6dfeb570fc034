#include "cli.hpp"

#include "minkrec/areas.hpp"
#include "minkrec/error.hpp"
#include "minkrec/geom.hpp"
#include "minkrec/instance.hpp"
#include "minkrec/jacobian.hpp"
#include "minkrec/mesh.hpp"
#include "minkrec/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>

namespace minkrec::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kOracleTolerance = 1e-6;
constexpr double kJacobianRelTolerance = 1e-5;
constexpr double kJacobianAbsTolerance = 1e-7;
constexpr double kKinkMargin = 1e-7;

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x + 0.0;  // no "-0"
  return s.str();
}

/// Ordered key/value summary printed as `key=value` lines or one JSON object.
class Summary {
 public:
  explicit Summary(bool as_json) : as_json_(as_json) {}

  template <typename T>
  Summary& add(const std::string& key, const T& value) {
    doc_[key] = value;
    std::ostringstream s;
    if constexpr (std::is_floating_point_v<T>) {
      s << fmt(value);
    } else if constexpr (std::is_same_v<T, bool>) {
      s << (value ? 1 : 0);
    } else {
      s << value;
    }
    lines_.push_back(key + "=" + s.str());
    return *this;
  }

  json& doc() { return doc_; }

  void print(std::ostream& out) const {
    if (as_json_) {
      out << doc_.dump(2) << '\n';
    } else {
      for (const auto& l : lines_) out << l << '\n';
    }
  }

 private:
  bool as_json_;
  json doc_ = json::object();
  std::vector<std::string> lines_;
};

void add_check(Summary& s, const std::string& name, const CheckResult& c) {
  s.add(name, std::string(c.pass ? "pass" : "fail"));
  s.add(name + "_measured", c.measured);
}

SolveOptions options_from(const RunConfig& cfg) {
  SolveOptions opts;
  if (cfg.tolerance) opts.residual_tolerance = *cfg.tolerance;
  if (cfg.max_iterations) opts.max_iterations = *cfg.max_iterations;
  opts.check();
  return opts;
}

// Independent of the analytic path: plain central differences of the face
// areas with respect to each free support value.
Eigen::MatrixXd central_differences(const Eigen::VectorXd& free, const GeometryCache& cache, double step) {
  const Eigen::Index n = free.size();
  Eigen::MatrixXd jac(n + 3, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const double hb = step * std::max(1.0, std::abs(free(b)));
    Eigen::VectorXd plus = free;
    Eigen::VectorXd minus = free;
    plus(b) += hb;
    minus(b) -= hb;
    jac.col(b) = (face_areas(SupportVector::from_free(plus), cache) -
                  face_areas(SupportVector::from_free(minus), cache)) /
                 (2.0 * hb);
  }
  return jac;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  InstanceData data;
  ValidationReport report;
  try {
    data = load_instance(cfg.input);
    report = validate(data.normals, data.areas);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }

  Summary s(cfg.json);
  s.add("faces", report.faces);
  add_check(s, "unit_norm", report.unit_norm);
  add_check(s, "distinctness", report.distinctness);
  add_check(s, "spanning", report.spanning);
  add_check(s, "positivity", report.positivity);
  add_check(s, "closure", report.closure);
  std::string failed;
  for (const auto& f : report.failures()) failed += (failed.empty() ? "" : ",") + f;
  s.add("failed", failed);
  s.add("status", std::string(report.passed() ? "pass" : "fail"));
  s.print(out);
  return report.passed() ? kSuccess : kNumericFailure;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.faces < 5) {
    err << "error: --faces must be at least 5\n";
    return kInputFailure;
  }
  InstanceData data;
  try {
    data = generate_random(cfg.faces, cfg.seed);
  } catch (const GenerationFailed& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  if (cfg.output.empty()) {
    out << dump_instance(data);
    return kSuccess;
  }
  try {
    save_instance(data, cfg.output);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }
  Summary s(cfg.json);
  s.add("faces", cfg.faces).add("seed", cfg.seed).add("output", cfg.output);
  s.print(out);
  return kSuccess;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();

  std::string format = cfg.format;
  if (format.empty()) {
    format = cfg.output.size() >= 5 && cfg.output.substr(cfg.output.size() - 5) == ".json" ? "json" : "obj";
  }

  InstanceData data;
  ProblemInstance instance;
  SolveOptions opts;
  try {
    data = load_instance(cfg.input);
    instance = make_instance(data.normals, data.areas);
    opts = options_from(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }

  const GeometryCache cache = build_cache(instance.normals);
  SolveResult result;
  try {
    result = solve(instance, cache, opts);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }

  Summary s(cfg.json);
  s.add("status", std::string(to_string(result.status)));
  s.add("iterations", result.iterations);
  s.add("residual", result.final_residual_inf);
  if (cfg.verbosity > 0) s.doc()["residual_history"] = result.accepted_residual_norms;

  int code = result.status == SolveStatus::Converged ? kSuccess : kNumericFailure;
  double oracle_error = std::numeric_limits<double>::infinity();
  try {
    const PolyMesh mesh = build_mesh(instance.normals, result.h_star.values, instance.permutation);
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(data.areas.data(), static_cast<Eigen::Index>(data.areas.size()));
    oracle_error = ((mesh.face_areas - target).array().abs() / target.array()).maxCoeff();
    s.add("vertices", mesh.vertices.size());
    s.add("edges", edge_count(mesh));
    if (!cfg.output.empty()) {
      if (format == "json") {
        export_json(mesh, cfg.output,
                    SolverSummary{result.iterations, result.final_residual_inf, std::string(to_string(result.status))});
      } else {
        export_obj(mesh, cfg.output);
      }
      s.add("output", cfg.output);
    }
  } catch (const DegenerateMesh& e) {
    err << "error: " << e.what() << '\n';
    code = kNumericFailure;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }
  if (!(oracle_error <= kOracleTolerance)) code = kNumericFailure;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  s.add("max_rel_area_error", oracle_error);
  s.add("wall_time_s", wall);
  s.print(out);
  return code;
}

int cmd_areas(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  InstanceData data;
  try {
    data = load_instance(cfg.input, false);
    if (data.normals.size() < 4) throw InvalidInput("at least 4 faces are required");
    if (cfg.support.size() != data.normals.size()) {
      throw LengthMismatch("--support needs " + std::to_string(data.normals.size()) + " values, got " +
                           std::to_string(cfg.support.size()));
    }
    // Area evaluation needs only distinct unit normals; closure is not required.
    const std::vector<double> ones(data.normals.size(), 1.0);
    const ValidationReport report = validate(data.normals, ones);
    if (!report.unit_norm.pass || !report.distinctness.pass) throw InvalidInput("normals must be distinct unit vectors");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }

  const GeometryCache cache = build_cache(data.normals);
  const SupportVector h(Eigen::Map<const Eigen::VectorXd>(cfg.support.data(), static_cast<Eigen::Index>(cfg.support.size())));
  EdgeTable table;
  Eigen::VectorXd areas;
  try {
    table = edge_lengths(h, cache);
    areas = face_areas(table);
  } catch (const UnboundedEdge& e) {
    Summary s(cfg.json);
    s.add("error", std::string("unbounded_edge")).add("face_i", e.face_i).add("face_j", e.face_j);
    s.print(out);
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }

  if (cfg.json) {
    json doc;
    doc["areas"] = std::vector<double>(areas.data(), areas.data() + areas.size());
    if (cfg.verbosity > 0) {
      doc["edges"] = json::array();
      for (std::size_t i = 0; i < cache.size(); ++i) {
        for (std::size_t j = i + 1; j < cache.size(); ++j) {
          doc["edges"].push_back({{"i", i}, {"j", j}, {"lambda", table.lambda(i, j)}, {"r_ij", table.r(i, j)}, {"r_ji", table.r(j, i)}});
        }
      }
    }
    out << doc.dump(2) << '\n';
    return kSuccess;
  }
  for (Eigen::Index i = 0; i < areas.size(); ++i) out << "face=" << i << " area=" << fmt(areas(i)) << '\n';
  if (cfg.verbosity > 0) {
    for (std::size_t i = 0; i < cache.size(); ++i) {
      for (std::size_t j = i + 1; j < cache.size(); ++j) {
        const EdgeRecord e = table.record(i, j);
        out << "edge i=" << i << " j=" << j << " lambda=" << fmt(e.lambda) << " lambda_min=" << fmt(e.lambda_min)
            << " lambda_max=" << fmt(e.lambda_max) << " k_min=" << e.k_min << " k_max=" << e.k_max
            << " killed_by=" << e.killed_by_zero_a << " antipodal=" << (e.antipodal ? 1 : 0) << '\n';
      }
    }
  }
  return kSuccess;
}

int cmd_check_jacobian(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ProblemInstance instance;
  try {
    const InstanceData data = load_instance(cfg.input);
    instance = make_instance(data.normals, data.areas);
    if (!cfg.support.empty() && cfg.support.size() + 3 != instance.size()) {
      throw LengthMismatch("--support needs " + std::to_string(instance.size() - 3) + " free values (gauge order)");
    }
    if (!(cfg.step > 0.0)) throw InvalidInput("--step must be positive");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputFailure;
  }

  const GeometryCache cache = build_cache(instance.normals);
  Eigen::VectorXd free;
  try {
    free = cfg.support.empty()
               ? initial_guess(instance, cache)
               : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(cfg.support.data(), static_cast<Eigen::Index>(cfg.support.size())));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }

  double max_abs = 0.0;
  double max_rel = 0.0;
  bool within = true;
  KinkMargin kink;
  try {
    const SupportVector h = SupportVector::from_free(free);
    const EdgeTable table = edge_lengths(h, cache);
    const JacobianMatrix analytic = jacobian(h, table, cache);
    const Eigen::MatrixXd numeric = central_differences(free, cache, cfg.step);
    kink = kink_margin(table, cache);
    for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
      for (Eigen::Index b = 0; b < analytic.cols(); ++b) {
        const double dev = std::abs(analytic(i, b) - numeric(i, b));
        max_abs = std::max(max_abs, dev);
        if (numeric(i, b) != 0.0) max_rel = std::max(max_rel, dev / std::abs(numeric(i, b)));
        within = within && dev <= std::max(kJacobianRelTolerance * std::abs(numeric(i, b)), kJacobianAbsTolerance);
      }
    }
  } catch (const UnboundedEdge& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }

  // A central-difference stencil of half-width `step` can straddle a kink
  // closer than this.
  const double kink_threshold = std::max(kKinkMargin, 10.0 * cfg.step * std::max(1.0, free.cwiseAbs().maxCoeff()));
  const bool near_kink = kink.margin <= kink_threshold;

  Summary s(cfg.json);
  s.add("max_abs_dev", max_abs).add("max_rel_dev", max_rel).add("kink_margin", kink.margin);
  s.add("kink_pair", std::to_string(kink.face_i) + "," + std::to_string(kink.face_j));
  s.add("near_kink", near_kink);
  const char* status = within ? "pass" : (near_kink ? "near_kink" : "fail");
  s.add("status", std::string(status));
  s.print(out);
  return within || near_kink ? kSuccess : kNumericFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Reconstruct convex polyhedra from face normals and areas", "minkrec"};
  app.require_subcommand(1);

  double tol = 0.0;
  int max_iter = 0;
  std::string support;

  auto* validate_cmd = app.add_subcommand("validate", "Check an instance against Minkowski's hypotheses");
  auto* generate_cmd = app.add_subcommand("generate", "Write a random closed instance");
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct the polyhedron and export a mesh");
  auto* areas_cmd = app.add_subcommand("areas", "Print the face areas of P(h)");
  auto* jac_cmd = app.add_subcommand("check-jacobian", "Compare the analytic Jacobian with finite differences");

  for (auto* cmd : {validate_cmd, reconstruct_cmd, areas_cmd, jac_cmd}) {
    cmd->add_option("--input,-i", cfg.input, "Instance JSON file")->required()->check(CLI::ExistingFile);
  }
  // Each subcommand gets its own flag objects; CLI11 resets variables bound
  // to options of subcommands that were not invoked.
  std::vector<std::pair<CLI::Option*, CLI::Option*>> output_flags;
  for (auto* cmd : {validate_cmd, generate_cmd, reconstruct_cmd, areas_cmd, jac_cmd}) {
    output_flags.emplace_back(cmd->add_flag("--json", "Print the summary as one JSON document"),
                              cmd->add_flag("-v,--verbose", "Increase verbosity"));
  }
  generate_cmd->add_option("--faces,-F", cfg.faces, "Number of faces (>= 5)");
  generate_cmd->add_option("--seed", cfg.seed, "Random seed");
  generate_cmd->add_option("--output,-o", cfg.output, "Output instance file (stdout if omitted)");

  reconstruct_cmd->add_option("--output,-o", cfg.output, "Output mesh file");
  reconstruct_cmd->add_option("--format", cfg.format, "Mesh format")->check(CLI::IsMember({"obj", "json"}));
  auto* tol_opt = reconstruct_cmd->add_option("--tol", tol, "Residual tolerance relative to the mean area")
                      ->check(CLI::PositiveNumber);
  auto* iter_opt = reconstruct_cmd->add_option("--max-iter", max_iter, "Maximum solver iterations")
                       ->check(CLI::PositiveNumber);

  areas_cmd->add_option("--support,-s", support, "Comma-separated support values h_1,...,h_F")->required();
  jac_cmd->add_option("--support,-s", support, "Comma-separated free support values h_4,...,h_F (gauge order)");
  jac_cmd->add_option("--step", cfg.step, "Relative finite-difference step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputFailure;
  }

  for (const auto& [json_flag, verbose_flag] : output_flags) {
    cfg.json = cfg.json || json_flag->count() > 0;
    cfg.verbosity += static_cast<int>(verbose_flag->count());
  }
  if (*tol_opt) cfg.tolerance = tol;
  if (*iter_opt) cfg.max_iterations = max_iter;
  if (!support.empty()) {
    std::stringstream ss(support);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        cfg.support.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        err << "error: bad support value '" << item << "'\n";
        return kInputFailure;
      }
    }
  }

  if (validate_cmd->parsed()) return cmd_validate(cfg, out, err);
  if (generate_cmd->parsed()) return cmd_generate(cfg, out, err);
  if (reconstruct_cmd->parsed()) return cmd_reconstruct(cfg, out, err);
  if (areas_cmd->parsed()) return cmd_areas(cfg, out, err);
  return cmd_check_jacobian(cfg, out, err);
}

}  // namespace minkrec::cli
