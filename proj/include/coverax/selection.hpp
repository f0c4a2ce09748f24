#pragma once

#include "coverax/kdtree.hpp"
#include "coverax/sampling.hpp"
#include "coverax/winding.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace coverax {

/// r_i = min_j |p_i - s_j|, exact.
Eigen::VectorXd compute_radii(const Points& candidates, const Points& samples);
Eigen::VectorXd compute_radii(const Points& candidates, const KdTree& samples);

/// offset: r' = r + delta; scale: r' = r (1 + delta).
Eigen::VectorXd dilate_radii(const Eigen::VectorXd& radii, double delta_r, DilationMode mode);

/// The coverage predicate d_ji: sample s inside the closed dilated ball.
inline bool ball_covers(const Vec3& center, double dilated_radius, const Vec3& sample) {
  return (center - sample).norm() <= dilated_radius;
}

/// Sparse boolean m x n incidence of samples vs dilated balls, stored both
/// by sample (covering candidates) and by candidate (covered samples).
class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  CoverageMatrix(Eigen::Index m, Eigen::Index n, const std::vector<std::vector<Eigen::Index>>& by_candidate);

  Eigen::Index samples() const { return m_; }
  Eigen::Index candidates() const { return n_; }
  std::size_t nonzeros() const { return col_index_.size(); }

  /// Samples covered by candidate i, ascending.
  std::span<const Eigen::Index> covered_by(Eigen::Index i) const {
    return {col_index_.data() + col_start_[i], col_index_.data() + col_start_[i + 1]};
  }
  /// Candidates covering sample j, ascending.
  std::span<const Eigen::Index> covering(Eigen::Index j) const {
    return {row_index_.data() + row_start_[j], row_index_.data() + row_start_[j + 1]};
  }
  bool covers(Eigen::Index i, Eigen::Index j) const;

 private:
  Eigen::Index m_ = 0, n_ = 0;
  std::vector<std::size_t> col_start_{0}, row_start_{0};
  std::vector<Eigen::Index> col_index_, row_index_;
};

CoverageMatrix build_coverage_matrix(const Points& candidates, const Eigen::VectorXd& dilated_radii,
                                     const Points& samples);

struct SelectionConfig {
  Eigen::Index target_v = 1;
  double omega = 1.0;
  double delta_r = 0.02;
  DilationMode dilation_mode = DilationMode::Offset;
  /// Picks the lowest score instead of the highest (literal pseudo-code).
  bool argmin = false;

  void validate() const;
};

/// Evolving partition P+ / P-, uncovered set S', iteration counter k.
class SelectionState {
 public:
  SelectionState() = default;
  SelectionState(Eigen::Index n_candidates, Eigen::Index n_samples);

  const std::vector<Eigen::Index>& selected() const { return selected_; }
  /// Unselected candidates, ascending.
  std::vector<Eigen::Index> remaining() const;
  bool is_selected(Eigen::Index i) const { return in_selected_[static_cast<std::size_t>(i)]; }
  bool is_uncovered(Eigen::Index j) const { return uncovered_[static_cast<std::size_t>(j)]; }
  Eigen::Index uncovered_count() const { return uncovered_count_; }
  std::vector<Eigen::Index> uncovered() const;
  Eigen::Index candidate_count() const { return static_cast<Eigen::Index>(in_selected_.size()); }
  Eigen::Index sample_count() const { return static_cast<Eigen::Index>(uncovered_.size()); }
  /// 1-based iteration counter; always selected().size() + 1.
  Eigen::Index k() const { return static_cast<Eigen::Index>(selected_.size()) + 1; }

  /// Moves i into P+ and removes its covered samples from S'. Returns the
  /// newly covered samples.
  std::vector<Eigen::Index> select(Eigen::Index i, const CoverageMatrix& matrix);

 private:
  std::vector<Eigen::Index> selected_;
  std::vector<bool> in_selected_;
  std::vector<bool> uncovered_;
  Eigen::Index uncovered_count_ = 0;
};

/// Cove_i = |{ j in S' : d_ji = 1 }| for each remaining i (ascending order).
Eigen::VectorXd coverage_scores(const CoverageMatrix& matrix, const SelectionState& state);

/// Unif_i = min over selected p of |p_i - p|; zeros while nothing is selected.
Eigen::VectorXd uniformity_scores(const Points& candidates, const SelectionState& state);

/// (v - mean) / sample std; zeros when the length is 1 or std < 1e-12.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> standardize(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = values.size();
  if (n <= 1) return Vector::Zero(n);
  const Scalar mean = values.mean();
  const Vector centered = values.array() - mean;
  const Scalar sd = std::sqrt(centered.squaredNorm() / static_cast<Scalar>(n - 1));
  if (sd < Scalar(1e-12)) return Vector::Zero(n);
  return centered / sd;
}

/// Score = Cove + omega * Unif, elementwise.
Eigen::VectorXd final_scores(const Eigen::VectorXd& cove_std, const Eigen::VectorXd& unif_std, double omega);

struct IterationRecord {
  Eigen::Index k = 0;
  Eigen::Index chosen = -1;
  double raw_cove = 0.0;
  double raw_unif = 0.0;
  double std_cove = 0.0;
  double std_unif = 0.0;
  double score = 0.0;
  Eigen::Index uncovered_after = 0;
};

/// Full per-iteration score vectors over the remaining candidates.
struct IterationScores {
  Eigen::Index k = 0;
  std::vector<Eigen::Index> remaining;
  Eigen::VectorXd cove, unif, cove_std, unif_std, score;
};

using IterationObserver = std::function<void(const IterationScores&)>;

struct SelectionResult {
  SelectionState state;
  std::vector<IterationRecord> trace;
  /// Scores of the last iteration.
  IterationScores last_scores;
};

/// Greedy coverage + uniformity selection. Loops while S' is nonempty and
/// k <= |V|, picking the highest Score (ties: lowest index).
SelectionResult select_skeletal_points(const Points& candidates, const CoverageMatrix& matrix,
                                       const SelectionConfig& config,
                                       const IterationObserver& observer = {});

struct ScpResult {
  std::vector<Eigen::Index> selected;
  /// Samples that no candidate covers (CoverageInfeasible when nonempty).
  std::vector<Eigen::Index> uncoverable;
  /// Samples still uncovered when max_points was reached.
  std::vector<Eigen::Index> uncovered;

  bool feasible() const { return uncoverable.empty(); }
};

/// Classic greedy set cover: repeatedly take the candidate covering the most
/// uncovered samples (ties: lowest index) until covered or max_points.
ScpResult greedy_scp_baseline(const CoverageMatrix& matrix, Eigen::Index max_points);

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace);

}  // namespace coverax
