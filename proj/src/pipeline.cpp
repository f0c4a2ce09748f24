#include "coverax/pipeline.hpp"

#include "coverax/kdtree.hpp"
#include "coverax/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace coverax {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Per-stage seed streams.
enum Stream : std::uint64_t { kSamples = 1, kCandidates, kEval, kEnvelope, kTriangulation };

const char* dilation_name(DilationMode mode) { return mode == DilationMode::Offset ? "offset" : "scale"; }

const char* format_name(FileFormat format) {
  switch (format) {
    case FileFormat::Obj: return "obj";
    case FileFormat::Off: return "off";
    case FileFormat::Ply: return "ply";
    case FileFormat::Xyz: return "xyz";
  }
  return "";
}

struct Connected {
  std::vector<MedialBall> balls;
  RegularTriangulation triangulation;
  Skeleton skeleton;
  ErrorReport errors;
};

Connected connect_and_measure(const PreparedShape& prepared, const RunConfig& config, const CandidateSet& candidates,
                              const std::vector<Eigen::Index>& chosen, std::map<std::string, double>* runtime) {
  Connected out;
  out.balls.reserve(chosen.size());
  for (Eigen::Index i : chosen) {
    out.balls.push_back({candidates.points.col(i), candidates.radii(i), candidates.dilated_radii(i)});
  }

  auto start = Clock::now();
  std::vector<WeightedPoint> weighted = make_weighted_points(out.balls, prepared.samples.points, config.delta_r);
  if (config.connection_factor != 1.0) weighted = adjust_connection_radii(weighted, out.balls, config.connection_factor);
  out.triangulation = regular_triangulation(weighted, derive_seed(config.seed, kTriangulation));
  out.skeleton = extract_skeleton(out.triangulation, weighted, out.balls);
  if (runtime) (*runtime)["connectivity"] = elapsed_ms(start);

  start = Clock::now();
  out.errors = hausdorff_errors(prepared.eval_points, out.skeleton, config.envelope_samples,
                                derive_seed(config.seed, kEnvelope), prepared.normalized_diagonal,
                                prepared.surface.get());
  out.errors.coverage_rate = coverage_rate(prepared.samples.points, out.balls);
  out.errors.bbox_diagonal = prepared.original_diagonal;
  if (runtime) (*runtime)["metrics"] = elapsed_ms(start);
  return out;
}

CandidateSet with_radii(const Points& points, const KdTree& samples, const RunConfig& config) {
  CandidateSet set;
  set.points = points;
  set.radii = compute_radii(points, samples);
  set.dilated_radii = dilate_radii(set.radii, config.delta_r, config.dilation_mode);
  set.dilation_mode = config.dilation_mode;
  set.delta_r = config.delta_r;
  return set;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

nlohmann::ordered_json report_json(const ErrorReport& e, std::size_t n_selected) {
  nlohmann::ordered_json j;
  j["eps_s2r"] = e.eps_s2r;
  j["eps_r2s"] = e.eps_r2s;
  j["eps_two_sided"] = e.eps_two_sided;
  j["coverage_rate"] = e.coverage_rate;
  j["bbox_diagonal"] = e.bbox_diagonal;
  j["n_selected"] = n_selected;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (samples < 1 || candidates < 1) throw Error(ErrorCode::UsageError, "sample and candidate counts must be >= 1");
  if (eval_samples < 1 || envelope_samples < 1) throw Error(ErrorCode::UsageError, "evaluation counts must be >= 1");
  if (!(connection_factor > 0.0)) throw Error(ErrorCode::NonpositiveFactor, "connection factor must be > 0");
  selection().validate();
}

SelectionConfig RunConfig::selection() const {
  SelectionConfig s;
  s.target_v = target_v;
  s.omega = omega;
  s.delta_r = delta_r;
  s.dilation_mode = dilation_mode;
  s.argmin = argmin;
  return s;
}

PreparedShape prepare_shape(const RunConfig& config) {
  config.validate();
  if (!std::filesystem::exists(config.input)) {
    throw Error(ErrorCode::IoError, "input file not found: " + config.input.string());
  }
  const FileFormat format = config.format ? *config.format : format_from_path(config.input);

  PreparedShape prepared;
  auto start = Clock::now();
  if (is_mesh_format(format) || (format == FileFormat::Ply && ply_has_faces(config.input))) {
    TriangleMesh mesh = load_mesh(config.input, format);
    prepared.original_diagonal = mesh.diagonal();
    prepared.shape = normalize_shape(mesh, prepared.transform);
  } else {
    OrientedPointCloud cloud = load_point_cloud(config.input, format);
    prepared.original_diagonal = cloud.diagonal();
    prepared.shape = normalize_shape(cloud, prepared.transform);
  }
  prepared.normalized_diagonal = shape_bbox(prepared.shape).diagonal();
  if (auto* cloud = std::get_if<OrientedPointCloud>(&prepared.shape); cloud && cloud->normals && !cloud->areas) {
    prepare_cloud_winding(*cloud);
  }
  prepared.runtime_ms["load"] = elapsed_ms(start);

  start = Clock::now();
  const std::uint64_t sample_seed = derive_seed(config.seed, kSamples);
  if (const auto* mesh = std::get_if<TriangleMesh>(&prepared.shape)) {
    prepared.samples = sample_surface(*mesh, config.samples, sample_seed);
    prepared.eval_points = sample_surface(*mesh, config.eval_samples, derive_seed(config.seed, kEval)).points;
    prepared.surface = std::make_shared<const MeshDistance>(*mesh);
  } else {
    const auto& cloud = std::get<OrientedPointCloud>(prepared.shape);
    prepared.samples = sample_surface(cloud, config.samples, sample_seed);
    prepared.eval_points = cloud.points;
  }
  prepared.runtime_ms["sampling"] = elapsed_ms(start);

  start = Clock::now();
  if (config.candidates_file) {
    const Eigen::MatrixXd table = read_columns(*config.candidates_file);
    if (table.cols() < 3) throw Error(ErrorCode::ParseError, "candidate file needs at least 3 columns");
    if (table.rows() == 0) throw Error(ErrorCode::EmptyCandidates, "candidate file is empty");
    prepared.candidates = prepared.transform.apply(Points(table.leftCols(3).transpose()));
  } else {
    CandidateOptions options;
    options.inside_threshold = config.inside_threshold;
    prepared.candidates =
        generate_candidates(prepared.shape, config.candidates, derive_seed(config.seed, kCandidates), options).points;
  }
  prepared.runtime_ms["candidates"] = elapsed_ms(start);
  return prepared;
}

StageOutcome run_stages(const PreparedShape& prepared, const RunConfig& config) {
  config.validate();
  StageOutcome out;

  auto start = Clock::now();
  const KdTree sample_tree(prepared.samples.points);
  out.candidates = with_radii(prepared.candidates, sample_tree, config);
  out.runtime_ms["radii"] = elapsed_ms(start);

  start = Clock::now();
  const CoverageMatrix matrix =
      build_coverage_matrix(out.candidates.points, out.candidates.dilated_radii, prepared.samples.points);
  out.runtime_ms["coverage_matrix"] = elapsed_ms(start);

  start = Clock::now();
  out.selection = select_skeletal_points(out.candidates.points, matrix, config.selection());
  out.runtime_ms["selection"] = elapsed_ms(start);

  Connected main = connect_and_measure(prepared, config, out.candidates, out.selection.state.selected(), &out.runtime_ms);
  out.balls = std::move(main.balls);
  out.triangulation = std::move(main.triangulation);
  out.skeleton = std::move(main.skeleton);
  out.errors = main.errors;

  if (config.baseline) {
    start = Clock::now();
    out.baseline = greedy_scp_baseline(matrix, matrix.candidates());
    if (!out.baseline->selected.empty()) {
      out.baseline_errors = connect_and_measure(prepared, config, out.candidates, out.baseline->selected, nullptr).errors;
    }
    out.runtime_ms["baseline"] = elapsed_ms(start);
  }
  return out;
}

Skeleton to_input_coordinates(const Skeleton& skeleton, const NormalizeTransform& transform) {
  Skeleton out = skeleton;
  out.centers = transform.invert(skeleton.centers);
  out.radii = skeleton.radii / transform.scale;
  return out;
}

std::string metrics_json(const RunConfig& config, const PreparedShape& prepared, const StageOutcome& outcome) {
  nlohmann::ordered_json j = report_json(outcome.errors, outcome.selection.state.selected().size());
  j["n_edges"] = outcome.skeleton.edges.size();
  j["n_triangles"] = outcome.skeleton.triangles.size();
  j["uncovered_remaining"] = outcome.selection.state.uncovered_count();
  j["m_samples"] = prepared.samples.size();
  j["n_candidates"] = prepared.candidates.cols();
  j["m_surface_eval"] = outcome.errors.m_surface;
  j["m_envelope_eval"] = outcome.errors.m_envelope;
  j["triangulation_perturbed"] = outcome.triangulation.perturbed;

  nlohmann::ordered_json runtime;
  double total = 0.0;
  for (const char* stage : {"load", "sampling", "candidates"}) {
    const double ms = prepared.runtime_ms.count(stage) ? prepared.runtime_ms.at(stage) : 0.0;
    runtime[stage] = ms;
    total += ms;
  }
  for (const char* stage : {"radii", "coverage_matrix", "selection", "connectivity", "metrics", "baseline"}) {
    if (!outcome.runtime_ms.count(stage)) continue;
    runtime[stage] = outcome.runtime_ms.at(stage);
    total += outcome.runtime_ms.at(stage);
  }
  runtime["total"] = total;
  j["runtime_ms"] = runtime;

  nlohmann::ordered_json c;
  c["input"] = config.input.string();
  c["format"] = format_name(config.format ? *config.format : format_from_path(config.input));
  c["samples"] = config.samples;
  c["candidates"] = config.candidates;
  c["candidates_file"] = config.candidates_file ? nlohmann::ordered_json(config.candidates_file->string())
                                                : nlohmann::ordered_json(nullptr);
  c["target_v"] = config.target_v;
  c["delta_r"] = config.delta_r;
  c["dilation_mode"] = dilation_name(config.dilation_mode);
  c["omega"] = config.omega;
  c["seed"] = config.seed;
  c["argmin"] = config.argmin;
  c["baseline"] = config.baseline;
  c["eval_samples"] = config.eval_samples;
  c["envelope_samples"] = config.envelope_samples;
  j["config"] = c;

  if (outcome.baseline) {
    nlohmann::ordered_json b;
    if (outcome.baseline_errors) {
      b = report_json(*outcome.baseline_errors, outcome.baseline->selected.size());
    } else {
      b["n_selected"] = 0;
    }
    b["feasible"] = outcome.baseline->feasible();
    b["uncoverable_samples"] = outcome.baseline->uncoverable.size();
    j["baseline"] = b;
  }
  return j.dump(2) + "\n";
}

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult result;
  result.prepared = prepare_shape(config);
  result.outcome = run_stages(result.prepared, config);
  result.metrics_json = metrics_json(config, result.prepared, result.outcome);

  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.out.string() + ": " + ec.message());

  const Skeleton skeleton = to_input_coordinates(result.outcome.skeleton, result.prepared.transform);
  write_skel(config.out / "skeleton.skel", skeleton);
  Eigen::MatrixXd radii = skeleton.radii;
  write_xyz(config.out / "selected_points.xyz", skeleton.centers, &radii);
  write_trace_csv(config.out / "trace.csv", result.outcome.selection.trace);
  write_text(config.out / "metrics.json", result.metrics_json);
  return result;
}

std::vector<AblationRow> ablate_v(const RunConfig& config, std::vector<Eigen::Index> v_list) {
  if (v_list.size() < 2) throw Error(ErrorCode::UsageError, "ablate-v needs at least two |V| values");
  for (Eigen::Index v : v_list) {
    if (v < 1) throw Error(ErrorCode::UsageError, "|V| values must be >= 1");
  }
  std::sort(v_list.begin(), v_list.end());
  RunConfig base = config;
  base.target_v = v_list.front();
  const PreparedShape prepared = prepare_shape(base);

  std::vector<AblationRow> rows;
  for (Eigen::Index v : v_list) {
    RunConfig run = base;
    run.target_v = v;
    const auto start = Clock::now();
    const StageOutcome outcome = run_stages(prepared, run);
    rows.push_back({static_cast<double>(v), static_cast<Eigen::Index>(outcome.selection.state.selected().size()),
                    outcome.errors.eps_two_sided, outcome.errors.coverage_rate, elapsed_ms(start)});
  }
  return rows;
}

std::vector<AblationRow> ablate_dilation(const RunConfig& config, const std::vector<double>& delta_list) {
  if (delta_list.size() < 2) throw Error(ErrorCode::UsageError, "ablate-dilation needs at least two delta values");
  for (double d : delta_list) {
    if (!(d >= 0.0)) throw Error(ErrorCode::NegativeDilation, "delta values must be >= 0");
  }
  RunConfig base = config;
  base.delta_r = delta_list.front();
  const PreparedShape prepared = prepare_shape(base);

  std::vector<AblationRow> rows;
  for (double d : delta_list) {
    RunConfig run = base;
    run.delta_r = d;
    const auto start = Clock::now();
    const StageOutcome outcome = run_stages(prepared, run);
    rows.push_back({d, static_cast<Eigen::Index>(outcome.selection.state.selected().size()),
                    outcome.errors.eps_two_sided, outcome.errors.coverage_rate, elapsed_ms(start)});
  }
  return rows;
}

BenchAxis parse_bench_axis(std::string_view name) {
  if (name == "P" || name == "p") return BenchAxis::P;
  if (name == "S" || name == "s") return BenchAxis::S;
  if (name == "V" || name == "v") return BenchAxis::V;
  throw Error(ErrorCode::UsageError, "bench axis must be P, S or V, got '" + std::string(name) + "'");
}

std::vector<BenchRow> scaling_bench(const RunConfig& config, BenchAxis axis, const std::vector<Eigen::Index>& sizes,
                                    int repeats) {
  if (sizes.size() < 3) throw Error(ErrorCode::UsageError, "bench needs at least three sizes");
  if (repeats < 1) throw Error(ErrorCode::UsageError, "bench repeats must be >= 1");
  for (Eigen::Index s : sizes) {
    if (s < 1) throw Error(ErrorCode::UsageError, "bench sizes must be >= 1");
  }
  const Eigen::Index largest = *std::max_element(sizes.begin(), sizes.end());

  // Generate the largest P or S once; smaller sizes take prefixes, so every
  // size shares the same points.
  RunConfig base = config;
  if (axis == BenchAxis::P) base.candidates = std::max(base.candidates, largest);
  if (axis == BenchAxis::S) base.samples = std::max(base.samples, largest);
  if (axis == BenchAxis::V) base.target_v = largest;
  base.eval_samples = 1;
  const PreparedShape prepared = prepare_shape(base);

  std::vector<BenchRow> rows;
  for (Eigen::Index size : sizes) {
    RunConfig run = config;
    Eigen::Index n_p = config.candidates, n_s = config.samples;
    if (axis == BenchAxis::P) n_p = size;
    if (axis == BenchAxis::S) n_s = size;
    if (axis == BenchAxis::V) run.target_v = size;
    n_p = std::min(n_p, prepared.candidates.cols());
    n_s = std::min(n_s, prepared.samples.points.cols());
    const Points candidates = prepared.candidates.leftCols(n_p);
    const Points samples = prepared.samples.points.leftCols(n_s);
    const SelectionConfig selection = run.selection();

    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) {
      const auto start = Clock::now();
      const KdTree tree(samples);
      const CandidateSet set = with_radii(candidates, tree, run);
      const CoverageMatrix matrix = build_coverage_matrix(set.points, set.dilated_radii, samples);
      const SelectionResult result = select_skeletal_points(set.points, matrix, selection);
      times.push_back(elapsed_ms(start));
      (void)result;
    }
    std::sort(times.begin(), times.end());
    rows.push_back({size, times[times.size() / 2]});
  }
  return rows;
}

namespace {

std::string ms(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

}  // namespace

std::string ablation_v_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "target_v,n_selected,eps_two_sided,coverage_rate,runtime_ms\n";
  for (const auto& r : rows) {
    out << static_cast<Eigen::Index>(r.parameter) << ',' << r.n_selected << ',' << r.eps_two_sided << ','
        << r.coverage_rate << ',' << ms(r.runtime_ms) << '\n';
  }
  return out.str();
}

std::string ablation_dilation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "delta_r,n_selected,eps_two_sided,coverage_rate,runtime_ms\n";
  for (const auto& r : rows) {
    out << r.parameter << ',' << r.n_selected << ',' << r.eps_two_sided << ',' << r.coverage_rate << ','
        << ms(r.runtime_ms) << '\n';
  }
  return out.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "size,wall_ms\n";
  for (const auto& r : rows) out << r.size << ',' << ms(r.wall_ms) << '\n';
  return out.str();
}

}  // namespace coverax
