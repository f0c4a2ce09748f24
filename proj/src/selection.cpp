#include "coverax/selection.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>

namespace coverax {

Eigen::VectorXd compute_radii(const Points& candidates, const KdTree& samples) {
  if (candidates.cols() == 0 || samples.size() == 0) {
    throw Error(ErrorCode::EmptySet, "radii need nonempty candidates and samples");
  }
  Eigen::VectorXd radii(candidates.cols());
  parallel_for(0, static_cast<std::size_t>(candidates.cols()), [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    radii(k) = samples.nearest(candidates.col(k)).distance;
  });
  return radii;
}

Eigen::VectorXd compute_radii(const Points& candidates, const Points& samples) {
  if (samples.cols() == 0) throw Error(ErrorCode::EmptySet, "radii need nonempty samples");
  return compute_radii(candidates, KdTree(samples));
}

Eigen::VectorXd dilate_radii(const Eigen::VectorXd& radii, double delta_r, DilationMode mode) {
  if (!(delta_r >= 0.0)) throw Error(ErrorCode::NegativeDilation, "delta_r must be >= 0");
  if (mode == DilationMode::Offset) return radii.array() + delta_r;
  return radii * (1.0 + delta_r);
}

CoverageMatrix::CoverageMatrix(Eigen::Index m, Eigen::Index n,
                               const std::vector<std::vector<Eigen::Index>>& by_candidate)
    : m_(m), n_(n) {
  std::vector<std::size_t> row_count(static_cast<std::size_t>(m), 0);
  col_start_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& col = by_candidate[static_cast<std::size_t>(i)];
    col_start_[static_cast<std::size_t>(i) + 1] = col_start_[static_cast<std::size_t>(i)] + col.size();
    col_index_.insert(col_index_.end(), col.begin(), col.end());
    for (Eigen::Index j : col) ++row_count[static_cast<std::size_t>(j)];
  }
  row_start_.assign(static_cast<std::size_t>(m) + 1, 0);
  for (Eigen::Index j = 0; j < m; ++j) {
    row_start_[static_cast<std::size_t>(j) + 1] = row_start_[static_cast<std::size_t>(j)] + row_count[static_cast<std::size_t>(j)];
  }
  row_index_.resize(col_index_.size());
  std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
  // Candidates are visited in ascending order, so each row comes out sorted.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j : by_candidate[static_cast<std::size_t>(i)]) {
      row_index_[fill[static_cast<std::size_t>(j)]++] = i;
    }
  }
}

bool CoverageMatrix::covers(Eigen::Index i, Eigen::Index j) const {
  const auto col = covered_by(i);
  return std::binary_search(col.begin(), col.end(), j);
}

CoverageMatrix build_coverage_matrix(const Points& candidates, const Eigen::VectorXd& dilated_radii,
                                     const Points& samples) {
  if (candidates.cols() != dilated_radii.size()) {
    throw Error(ErrorCode::LengthMismatch, "one dilated radius per candidate required");
  }
  if (candidates.cols() == 0 || samples.cols() == 0) {
    throw Error(ErrorCode::EmptySet, "coverage matrix needs candidates and samples");
  }
  const KdTree tree(samples);
  std::vector<std::vector<Eigen::Index>> by_candidate(static_cast<std::size_t>(candidates.cols()));
  parallel_for(0, by_candidate.size(), [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    auto& col = by_candidate[i];
    col = tree.within(candidates.col(k), dilated_radii(k));
    // within() uses the same closed-ball test; re-check for the exact predicate.
    std::erase_if(col, [&](Eigen::Index j) {
      return !ball_covers(candidates.col(k), dilated_radii(k), samples.col(j));
    });
  });
  return CoverageMatrix(samples.cols(), candidates.cols(), by_candidate);
}

void SelectionConfig::validate() const {
  if (target_v < 1) throw Error(ErrorCode::UsageError, "target |V| must be >= 1");
  if (!(omega >= 0.0)) throw Error(ErrorCode::UsageError, "omega must be >= 0");
  if (!(delta_r >= 0.0)) throw Error(ErrorCode::NegativeDilation, "delta_r must be >= 0");
}

SelectionState::SelectionState(Eigen::Index n_candidates, Eigen::Index n_samples)
    : in_selected_(static_cast<std::size_t>(n_candidates), false),
      uncovered_(static_cast<std::size_t>(n_samples), true),
      uncovered_count_(n_samples) {}

std::vector<Eigen::Index> SelectionState::remaining() const {
  std::vector<Eigen::Index> out;
  out.reserve(in_selected_.size() - selected_.size());
  for (std::size_t i = 0; i < in_selected_.size(); ++i) {
    if (!in_selected_[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<Eigen::Index> SelectionState::uncovered() const {
  std::vector<Eigen::Index> out;
  for (std::size_t j = 0; j < uncovered_.size(); ++j) {
    if (uncovered_[j]) out.push_back(static_cast<Eigen::Index>(j));
  }
  return out;
}

std::vector<Eigen::Index> SelectionState::select(Eigen::Index i, const CoverageMatrix& matrix) {
  in_selected_[static_cast<std::size_t>(i)] = true;
  selected_.push_back(i);
  std::vector<Eigen::Index> newly;
  for (Eigen::Index j : matrix.covered_by(i)) {
    if (uncovered_[static_cast<std::size_t>(j)]) {
      uncovered_[static_cast<std::size_t>(j)] = false;
      --uncovered_count_;
      newly.push_back(j);
    }
  }
  return newly;
}

Eigen::VectorXd coverage_scores(const CoverageMatrix& matrix, const SelectionState& state) {
  const auto remaining = state.remaining();
  Eigen::VectorXd out(static_cast<Eigen::Index>(remaining.size()));
  for (std::size_t r = 0; r < remaining.size(); ++r) {
    Eigen::Index count = 0;
    for (Eigen::Index j : matrix.covered_by(remaining[r])) count += state.is_uncovered(j) ? 1 : 0;
    out(static_cast<Eigen::Index>(r)) = static_cast<double>(count);
  }
  return out;
}

Eigen::VectorXd uniformity_scores(const Points& candidates, const SelectionState& state) {
  const auto remaining = state.remaining();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(remaining.size()));
  if (state.selected().empty()) return out;
  for (std::size_t r = 0; r < remaining.size(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index s : state.selected()) {
      best = std::min(best, (candidates.col(remaining[r]) - candidates.col(s)).norm());
    }
    out(static_cast<Eigen::Index>(r)) = best;
  }
  return out;
}

Eigen::VectorXd final_scores(const Eigen::VectorXd& cove_std, const Eigen::VectorXd& unif_std, double omega) {
  if (cove_std.size() != unif_std.size()) {
    throw Error(ErrorCode::LengthMismatch, "score vectors differ in length");
  }
  return cove_std + omega * unif_std;
}

SelectionResult select_skeletal_points(const Points& candidates, const CoverageMatrix& matrix,
                                       const SelectionConfig& config,
                                       const IterationObserver& observer) {
  config.validate();
  const Eigen::Index n = candidates.cols();
  if (n == 0) throw Error(ErrorCode::EmptyCandidates, "no candidates to select from");
  if (matrix.candidates() != n) {
    throw Error(ErrorCode::LengthMismatch, "coverage matrix does not match the candidate set");
  }

  SelectionResult result{SelectionState(n, matrix.samples()), {}, {}};
  SelectionState& state = result.state;

  // Cove and Unif are maintained incrementally; both are exact (integer
  // counts and a running min of the same norms), so they equal a recount.
  std::vector<Eigen::Index> cove(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) cove[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(matrix.covered_by(i).size());
  std::vector<double> unif(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) remaining[static_cast<std::size_t>(i)] = i;

  while (state.uncovered_count() > 0 && state.k() <= config.target_v && !remaining.empty()) {
    const auto count = static_cast<Eigen::Index>(remaining.size());
    IterationScores scores;
    scores.k = state.k();
    scores.cove.resize(count);
    scores.unif.resize(count);
    const bool first = state.selected().empty();
    for (Eigen::Index r = 0; r < count; ++r) {
      const auto i = static_cast<std::size_t>(remaining[static_cast<std::size_t>(r)]);
      scores.cove(r) = static_cast<double>(cove[i]);
      scores.unif(r) = first ? 0.0 : unif[i];
    }
    scores.cove_std = standardize(scores.cove);
    scores.unif_std = standardize(scores.unif);
    scores.score = final_scores(scores.cove_std, scores.unif_std, config.omega);

    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < count; ++r) {
      const bool better = config.argmin ? scores.score(r) < scores.score(best)
                                        : scores.score(r) > scores.score(best);
      if (better) best = r;
    }
    const Eigen::Index chosen = remaining[static_cast<std::size_t>(best)];

    for (Eigen::Index j : state.select(chosen, matrix)) {
      for (Eigen::Index c : matrix.covering(j)) --cove[static_cast<std::size_t>(c)];
    }
    result.trace.push_back({scores.k, chosen, scores.cove(best), scores.unif(best), scores.cove_std(best),
                            scores.unif_std(best), scores.score(best), state.uncovered_count()});

    remaining.erase(remaining.begin() + best);
    const Vec3 p = candidates.col(chosen);
    for (Eigen::Index i : remaining) {
      double& u = unif[static_cast<std::size_t>(i)];
      u = std::min(u, (candidates.col(i) - p).norm());
    }

    scores.remaining.assign(remaining.begin(), remaining.end());
    scores.remaining.insert(scores.remaining.begin() + best, chosen);
    if (observer) observer(scores);
    result.last_scores = std::move(scores);
  }
  return result;
}

ScpResult greedy_scp_baseline(const CoverageMatrix& matrix, Eigen::Index max_points) {
  const Eigen::Index n = matrix.candidates(), m = matrix.samples();
  if (n == 0 || m == 0) throw Error(ErrorCode::EmptySet, "empty coverage matrix");
  ScpResult out;
  std::vector<bool> uncovered(static_cast<std::size_t>(m), true);
  Eigen::Index remaining = m;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (matrix.covering(j).empty()) {
      out.uncoverable.push_back(j);
      uncovered[static_cast<std::size_t>(j)] = false;
      --remaining;
    }
  }
  std::vector<Eigen::Index> gain(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) gain[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(matrix.covered_by(i).size());

  while (remaining > 0 && static_cast<Eigen::Index>(out.selected.size()) < max_points) {
    const auto it = std::max_element(gain.begin(), gain.end());  // first max = lowest index
    if (*it == 0) break;
    const auto chosen = static_cast<Eigen::Index>(it - gain.begin());
    out.selected.push_back(chosen);
    for (Eigen::Index j : matrix.covered_by(chosen)) {
      if (!uncovered[static_cast<std::size_t>(j)]) continue;
      uncovered[static_cast<std::size_t>(j)] = false;
      --remaining;
      for (Eigen::Index c : matrix.covering(j)) --gain[static_cast<std::size_t>(c)];
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (uncovered[static_cast<std::size_t>(j)]) out.uncovered.push_back(j);
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << "k,chosen_index,raw_cove,raw_unif,std_cove,std_unif,score,uncovered_remaining\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.k << ',' << r.chosen << ',' << r.raw_cove << ',' << r.raw_unif << ',' << r.std_cove << ','
        << r.std_unif << ',' << r.score << ',' << r.uncovered_after << '\n';
  }
}

}  // namespace coverax
