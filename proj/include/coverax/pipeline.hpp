#pragma once

#include "coverax/metrics.hpp"
#include "coverax/selection.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace coverax {

struct RunConfig {
  std::filesystem::path input;
  std::optional<FileFormat> format;  // inferred from the extension when unset
  Eigen::Index samples = 1500;
  Eigen::Index candidates = 10000;
  Eigen::Index target_v = 0;  // required
  double delta_r = 0.02;
  DilationMode dilation_mode = DilationMode::Offset;
  double omega = 1.0;
  std::uint64_t seed = 0;
  bool baseline = false;
  bool argmin = false;
  std::optional<std::filesystem::path> candidates_file;
  std::filesystem::path out = "out";
  double inside_threshold = 0.5;
  /// Dense evaluation samples for the Hausdorff errors.
  Eigen::Index eval_samples = 100000;
  Eigen::Index envelope_samples = 100000;
  /// Multiplier on r' for the inner weights of the regular triangulation.
  double connection_factor = 1.0;

  void validate() const;
  SelectionConfig selection() const;
};

/// Shape, samples and candidates in normalized coordinates; shared by all
/// runs of an ablation.
struct PreparedShape {
  Shape shape;
  NormalizeTransform transform;
  double original_diagonal = 0.0;
  double normalized_diagonal = 0.0;
  SurfaceSamples samples;
  Points candidates;
  Points eval_points;
  /// Exact surface distance for mesh inputs; null for point clouds.
  std::shared_ptr<const MeshDistance> surface;
  std::map<std::string, double> runtime_ms;
};

PreparedShape prepare_shape(const RunConfig& config);

struct StageOutcome {
  CandidateSet candidates;
  SelectionResult selection;
  std::vector<MedialBall> balls;
  RegularTriangulation triangulation;
  Skeleton skeleton;  // normalized coordinates
  ErrorReport errors;
  std::optional<ScpResult> baseline;
  std::optional<ErrorReport> baseline_errors;
  std::map<std::string, double> runtime_ms;
};

/// Radii, dilation, coverage matrix, selection, connectivity and metrics.
StageOutcome run_stages(const PreparedShape& prepared, const RunConfig& config);

/// Skeleton mapped back to input coordinates.
Skeleton to_input_coordinates(const Skeleton& skeleton, const NormalizeTransform& transform);

struct PipelineResult {
  PreparedShape prepared;
  StageOutcome outcome;
  std::string metrics_json;
};

/// Full run; writes skeleton.skel, selected_points.xyz, trace.csv and
/// metrics.json under config.out.
PipelineResult run_pipeline(const RunConfig& config);

/// metrics.json contents with stable key order.
std::string metrics_json(const RunConfig& config, const PreparedShape& prepared, const StageOutcome& outcome);

struct AblationRow {
  double parameter = 0.0;
  Eigen::Index n_selected = 0;
  double eps_two_sided = 0.0;
  double coverage_rate = 0.0;
  double runtime_ms = 0.0;
};

/// One run per |V| on shared samples/candidates, sorted by |V|.
std::vector<AblationRow> ablate_v(const RunConfig& config, std::vector<Eigen::Index> v_list);
/// One run per delta_r on shared samples/candidates, in the given order.
std::vector<AblationRow> ablate_dilation(const RunConfig& config, const std::vector<double>& delta_list);

enum class BenchAxis { P, S, V };
BenchAxis parse_bench_axis(std::string_view name);

struct BenchRow {
  Eigen::Index size = 0;
  double wall_ms = 0.0;
};

/// Times the selection stage only (radii, coverage matrix, greedy loop),
/// median of `repeats` runs per size.
std::vector<BenchRow> scaling_bench(const RunConfig& config, BenchAxis axis, const std::vector<Eigen::Index>& sizes,
                                    int repeats = 3);

std::string ablation_v_csv(const std::vector<AblationRow>& rows);
std::string ablation_dilation_csv(const std::vector<AblationRow>& rows);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace coverax
