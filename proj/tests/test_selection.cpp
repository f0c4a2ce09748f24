#include "coverax/kdtree.hpp"
#include "coverax/selection.hpp"
#include "oracles/reference_selection.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace coverax;

namespace {

Points random_points(Rng& rng, Eigen::Index n, double lo = 0.0, double hi = 1.0) {
  Points p(3, n);
  for (Eigen::Index i = 0; i < n; ++i) p.col(i) = Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
  return p;
}

std::vector<oracle::P3> to_p3(const Points& p) {
  std::vector<oracle::P3> out;
  for (Eigen::Index i = 0; i < p.cols(); ++i) out.push_back({p(0, i), p(1, i), p(2, i)});
  return out;
}

CoverageMatrix matrix_from(Eigen::Index m, const std::vector<std::vector<Eigen::Index>>& by_candidate) {
  return CoverageMatrix(m, static_cast<Eigen::Index>(by_candidate.size()), by_candidate);
}

std::vector<Eigen::Index> selection_of(const Points& candidates, const CoverageMatrix& matrix, Eigen::Index v,
                                       double omega) {
  SelectionConfig config;
  config.target_v = v;
  config.omega = omega;
  return select_skeletal_points(candidates, matrix, config).state.selected();
}

}  // namespace

TEST_SUITE("radii") {
  TEST_CASE("center of a sampled sphere") {
    Rng rng(1);
    Points samples(3, 100);
    for (Eigen::Index j = 0; j < 100; ++j) {
      Vec3 d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
      samples.col(j) = d.normalized();
    }
    const Eigen::VectorXd r = compute_radii(Points(Vec3::Zero()), samples);
    CHECK(r(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(compute_radii(Points(samples.col(42)), samples)(0) == 0.0);
  }

  TEST_CASE("radii equal brute-force nearest distances exactly") {
    Rng rng(2);
    const Points candidates = random_points(rng, 500), samples = random_points(rng, 300);
    const Eigen::VectorXd r = compute_radii(candidates, samples);
    for (Eigen::Index i = 0; i < 500; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < 300; ++j) best = std::min(best, (candidates.col(i) - samples.col(j)).norm());
      CHECK(r(i) == best);
    }
    CHECK_THROWS_AS(compute_radii(candidates, Points(3, 0)), Error);
  }

  TEST_CASE("dilation by offset and scale") {
    Eigen::VectorXd r(2);
    r << 0.10, 0.5;
    CHECK(dilate_radii(r, 0.02, DilationMode::Offset)(0) == doctest::Approx(0.12));
    CHECK(dilate_radii(r, 0.02, DilationMode::Scale)(0) == doctest::Approx(0.102));
    CHECK(dilate_radii(r, 0.0, DilationMode::Offset) == r);
    CHECK(dilate_radii(r, 0.0, DilationMode::Scale) == r);
    try {
      dilate_radii(r, -0.1, DilationMode::Offset);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NegativeDilation);
    }
  }
}

TEST_SUITE("coverage matrix") {
  TEST_CASE("closed ball boundary") {
    const Points p(Vec3::Zero()), s(Vec3(1, 0, 0));
    CHECK(build_coverage_matrix(p, Eigen::VectorXd::Constant(1, 1.02), s).covers(0, 0));
    CHECK_FALSE(build_coverage_matrix(p, Eigen::VectorXd::Constant(1, 0.99), s).covers(0, 0));
    CHECK(build_coverage_matrix(p, Eigen::VectorXd::Constant(1, 1.0), s).covers(0, 0));
  }

  TEST_CASE("random instance matches the dense brute-force matrix") {
    Rng rng(3);
    const Points candidates = random_points(rng, 80), samples = random_points(rng, 50);
    Eigen::VectorXd radii(80);
    for (Eigen::Index i = 0; i < 80; ++i) radii(i) = rng.uniform(0.0, 0.5);
    const CoverageMatrix d = build_coverage_matrix(candidates, radii, samples);
    std::size_t nnz = 0;
    for (Eigen::Index j = 0; j < 50; ++j) {
      for (Eigen::Index i = 0; i < 80; ++i) {
        const bool expect = (candidates.col(i) - samples.col(j)).norm() <= radii(i);
        CHECK(d.covers(i, j) == expect);
        nnz += expect;
        const auto row = d.covering(j);
        const auto col = d.covered_by(i);
        CHECK((std::find(row.begin(), row.end(), i) != row.end()) == expect);
        CHECK((std::find(col.begin(), col.end(), j) != col.end()) == expect);
      }
    }
    CHECK(d.nonzeros() == nnz);
  }

  TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(build_coverage_matrix(Points::Zero(3, 3), Eigen::VectorXd::Ones(2), Points::Zero(3, 1)), Error);
  }
}

TEST_SUITE("scores") {
  TEST_CASE("standardization examples") {
    CHECK(standardize(Eigen::Vector3d(1, 2, 3)).isApprox(Eigen::Vector3d(-1, 0, 1)));
    CHECK(standardize(Eigen::Vector3d(5, 5, 5)) == Eigen::Vector3d::Zero());
    CHECK(standardize(Eigen::VectorXd::Constant(1, 2.0)) == Eigen::VectorXd::Zero(1));
  }

  TEST_CASE("final score examples") {
    CHECK(final_scores(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, -0.2), 1.0)(0) ==
          doctest::Approx(0.3));
    const Eigen::Vector2d cove(1, -1), unif(-1, 1);
    CHECK(final_scores(cove, unif, 2.0) == Eigen::VectorXd(Eigen::Vector2d(-1, 1)));
    CHECK(final_scores(cove, unif, 0.0) == Eigen::VectorXd(cove));
    CHECK_THROWS_AS(final_scores(cove, Eigen::VectorXd::Zero(3), 1.0), Error);
  }

  TEST_CASE("coverage and uniformity scores on a small state") {
    // Candidate 0 covers samples 0-6, candidate 1 covers 0-2, candidate 2 covers 7.
    const CoverageMatrix d = matrix_from(8, {{0, 1, 2, 3, 4, 5, 6}, {0, 1, 2}, {7}});
    Points candidates(3, 3);
    candidates << 0, 0.4, 1, 0, 0, 0, 0, 0, 0;
    SelectionState state(3, 8);
    CHECK(coverage_scores(d, state) == Eigen::VectorXd(Eigen::Vector3d(7, 3, 1)));
    CHECK(uniformity_scores(candidates, state) == Eigen::VectorXd::Zero(3));
    state.select(0, d);
    CHECK(coverage_scores(d, state) == Eigen::VectorXd(Eigen::Vector2d(0, 1)));
    CHECK(uniformity_scores(candidates, state) == Eigen::VectorXd(Eigen::Vector2d(0.4, 1.0)));
    state.select(2, d);
    CHECK(uniformity_scores(candidates, state)(0) == doctest::Approx(0.4));
    CHECK(state.uncovered_count() == 0);
  }
}

TEST_SUITE("greedy selection") {
  TEST_CASE("one candidate covering everything stops after one iteration") {
    const CoverageMatrix d = matrix_from(4, {{0, 1}, {0, 1, 2, 3}, {3}});
    const Points candidates = Points::Random(3, 3);
    SelectionConfig config;
    config.target_v = 5;
    const SelectionResult r = select_skeletal_points(candidates, d, config);
    CHECK(r.state.selected() == std::vector<Eigen::Index>{1});
    CHECK(r.trace.size() == 1);
    CHECK(r.trace[0].uncovered_after == 0);
  }

  TEST_CASE("disjoint coverage 5/3/1 is taken in coverage order") {
    const CoverageMatrix d = matrix_from(9, {{8}, {0, 1, 2, 3, 4}, {5, 6, 7}});
    Points candidates(3, 3);
    candidates << 0, 1, 2, 0, 0, 0, 0, 0, 0;
    CHECK(selection_of(candidates, d, 3, 1.0) == std::vector<Eigen::Index>{1, 2, 0});
  }

  TEST_CASE("ties go to the lowest index") {
    const CoverageMatrix d = matrix_from(4, {{0, 1}, {2, 3}, {0, 1}});
    CHECK(selection_of(Points::Zero(3, 3), d, 1, 1.0) == std::vector<Eigen::Index>{0});
  }

  TEST_CASE("argmin switch follows the literal pseudo-code") {
    const CoverageMatrix d = matrix_from(9, {{8}, {0, 1, 2, 3, 4}, {5, 6, 7}});
    SelectionConfig config;
    config.target_v = 1;
    config.argmin = true;
    CHECK(select_skeletal_points(Points::Zero(3, 3), d, config).state.selected() == std::vector<Eigen::Index>{0});
  }

  TEST_CASE("invalid configuration and empty candidates") {
    const CoverageMatrix d = matrix_from(1, {{0}});
    SelectionConfig config;
    config.target_v = 0;
    CHECK_THROWS_AS(select_skeletal_points(Points::Zero(3, 1), d, config), Error);
    config.target_v = 1;
    try {
      select_skeletal_points(Points(3, 0), CoverageMatrix(1, 0, {}), config);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCandidates);
    }
  }

  TEST_CASE("matches the reference simulation on random instances") {
    Rng rng(4);
    for (int instance = 0; instance < 300; ++instance) {
      const auto n = static_cast<Eigen::Index>(1 + rng.index(10));
      const auto m = static_cast<Eigen::Index>(1 + rng.index(12));
      const auto v = static_cast<Eigen::Index>(1 + rng.index(5));
      const double omega = rng.uniform(0.0, 2.0);
      const Points candidates = random_points(rng, n), samples = random_points(rng, m);
      Eigen::VectorXd radii(n);
      for (Eigen::Index i = 0; i < n; ++i) radii(i) = rng.uniform(0.05, 0.6);
      const CoverageMatrix d = build_coverage_matrix(candidates, radii, samples);

      const auto cover =
          oracle::coverage(to_p3(candidates), std::vector<double>(radii.data(), radii.data() + n), to_p3(samples));
      const oracle::RefRun ref = oracle::simulate(to_p3(candidates), cover, static_cast<std::size_t>(v), omega);

      std::vector<IterationScores> seen;
      SelectionConfig config;
      config.target_v = v;
      config.omega = omega;
      const SelectionResult got =
          select_skeletal_points(candidates, d, config, [&](const IterationScores& s) { seen.push_back(s); });
      CAPTURE(instance);
      REQUIRE(seen.size() == ref.iterations.size());
      for (std::size_t k = 0; k < seen.size(); ++k) {
        const auto& a = seen[k];
        const auto& b = ref.iterations[k];
        REQUIRE(a.remaining.size() == b.remaining.size());
        for (std::size_t r = 0; r < b.remaining.size(); ++r) {
          const auto idx = static_cast<Eigen::Index>(r);
          CHECK(a.remaining[r] == static_cast<Eigen::Index>(b.remaining[r]));
          CHECK(a.cove(idx) == b.cove[r]);
          CHECK(std::abs(a.unif(idx) - b.unif[r]) <= 1e-12);
          CHECK(std::abs(a.score(idx) - b.score[r]) <= 1e-12);
        }
        CHECK(got.trace[k].chosen == static_cast<Eigen::Index>(b.chosen));
      }
      CHECK(got.state.uncovered_count() == static_cast<Eigen::Index>(ref.uncovered_left));
    }
  }
}

TEST_SUITE("selection invariants") {
  struct Instance {
    Points candidates, samples;
    Eigen::VectorXd radii;
  };

  Instance random_instance(Rng & rng, Eigen::Index n, Eigen::Index m) {
    Instance in{random_points(rng, n), random_points(rng, m), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) in.radii(i) = rng.uniform(0.05, 0.35);
    return in;
  }

  TEST_CASE("state partitions, monotone uncovered set and raw coverage") {
    Rng rng(5);
    const Instance in = random_instance(rng, 60, 80);
    const CoverageMatrix d = build_coverage_matrix(in.candidates, in.radii, in.samples);
    SelectionConfig config;
    config.target_v = 15;
    std::vector<IterationScores> seen;
    const SelectionResult r = select_skeletal_points(in.candidates, d, config, [&](const IterationScores& s) {
      seen.push_back(s);
    });
    CHECK(static_cast<Eigen::Index>(r.state.selected().size()) == r.state.k() - 1);
    std::set<Eigen::Index> all(r.state.selected().begin(), r.state.selected().end());
    for (Eigen::Index i : r.state.remaining()) CHECK(all.insert(i).second);
    CHECK(all.size() == 60);
    for (Eigen::Index j = 0; j < 80; ++j) {
      bool covered = false;
      for (Eigen::Index i : r.state.selected()) covered = covered || d.covers(i, j);
      CHECK(r.state.is_uncovered(j) == !covered);
    }
    for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k].uncovered_after <= r.trace[k - 1].uncovered_after);
    // Raw coverage of any fixed candidate never grows.
    for (std::size_t k = 1; k < seen.size(); ++k) {
      for (std::size_t a = 0; a < seen[k].remaining.size(); ++a) {
        const auto it = std::find(seen[k - 1].remaining.begin(), seen[k - 1].remaining.end(), seen[k].remaining[a]);
        REQUIRE(it != seen[k - 1].remaining.end());
        const auto b = static_cast<Eigen::Index>(it - seen[k - 1].remaining.begin());
        CHECK(seen[k].cove(static_cast<Eigen::Index>(a)) <= seen[k - 1].cove(b));
      }
    }
  }

  TEST_CASE("incremental scores equal a recount mid-run") {
    Rng rng(6);
    const Instance in = random_instance(rng, 40, 60);
    const CoverageMatrix d = build_coverage_matrix(in.candidates, in.radii, in.samples);
    SelectionConfig config;
    config.target_v = 8;
    SelectionState replay(40, 60);
    select_skeletal_points(in.candidates, d, config, [&](const IterationScores& s) {
      // Scores were computed before this iteration's pick was applied.
      std::vector<Eigen::Index> rem = replay.remaining();
      CHECK(rem == s.remaining);
      CHECK(coverage_scores(d, replay) == s.cove);
      CHECK(uniformity_scores(in.candidates, replay) == s.unif);
      const auto chosen = std::max_element(s.score.data(), s.score.data() + s.score.size()) - s.score.data();
      replay.select(s.remaining[static_cast<std::size_t>(chosen)], d);
    });
  }

  TEST_CASE("omega zero picks the max raw coverage each iteration") {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
      const Instance in = random_instance(rng, 30, 40);
      const CoverageMatrix d = build_coverage_matrix(in.candidates, in.radii, in.samples);
      SelectionConfig config;
      config.target_v = 10;
      config.omega = 0.0;
      select_skeletal_points(in.candidates, d, config, [&](const IterationScores& s) {
        const auto best = std::max_element(s.cove.data(), s.cove.data() + s.cove.size()) - s.cove.data();
        const auto chosen = std::max_element(s.score.data(), s.score.data() + s.score.size()) - s.score.data();
        CHECK(best == chosen);
      });
    }
  }

  TEST_CASE("positive scaling of raw scores leaves the picks unchanged") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
      const Instance in = random_instance(rng, 30, 40);
      const CoverageMatrix d = build_coverage_matrix(in.candidates, in.radii, in.samples);
      const auto base = selection_of(in.candidates, d, 8, 1.0);
      // Unif scales with the geometry; coverage is unchanged.
      const double c = 3.7;
      const CoverageMatrix d2 = build_coverage_matrix(in.candidates * c, in.radii * c, in.samples * c);
      CHECK(selection_of(in.candidates * c, d2, 8, 1.0) == base);
      // Tripling every sample triples every raw coverage count.
      Points tripled(3, 3 * in.samples.cols());
      tripled << in.samples, in.samples, in.samples;
      const CoverageMatrix d3 = build_coverage_matrix(in.candidates, in.radii, tripled);
      CHECK(selection_of(in.candidates, d3, 8, 1.0) == base);
    }
  }

  TEST_CASE("uniformity spreads selections on a uniform-coverage grid") {
    Points grid(3, 800);
    std::vector<std::vector<Eigen::Index>> by_candidate;
    Eigen::Index c = 0;
    for (int z = 0; z < 2; ++z)
      for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) {
          grid.col(c) = Vec3(x, y, z);
          by_candidate.push_back({c});
          ++c;
        }
    const CoverageMatrix d = matrix_from(800, by_candidate);
    auto min_gap = [&](const std::vector<Eigen::Index>& sel) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < sel.size(); ++a)
        for (std::size_t b = a + 1; b < sel.size(); ++b) best = std::min(best, (grid.col(sel[a]) - grid.col(sel[b])).norm());
      return best;
    };
    const double spread = min_gap(selection_of(grid, d, 10, 1.0));
    const double packed = min_gap(selection_of(grid, d, 10, 0.0));
    CHECK(spread > packed);
  }

  TEST_CASE("same inputs give the same trace") {
    Rng rng(9);
    const Instance in = random_instance(rng, 50, 50);
    const CoverageMatrix d = build_coverage_matrix(in.candidates, in.radii, in.samples);
    SelectionConfig config;
    config.target_v = 10;
    const auto a = select_skeletal_points(in.candidates, d, config).trace;
    const auto b = select_skeletal_points(in.candidates, d, config).trace;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].chosen == b[k].chosen);
      CHECK(a[k].score == b[k].score);
    }
  }

  TEST_CASE("trace csv has one row per iteration") {
    const CoverageMatrix d = matrix_from(9, {{8}, {0, 1, 2, 3, 4}, {5, 6, 7}});
    SelectionConfig config;
    config.target_v = 3;
    const auto r = select_skeletal_points(Points::Random(3, 3), d, config);
    const auto dir = test::scratch_dir("trace");
    write_trace_csv(dir / "trace.csv", r.trace);
    const std::string text = test::read_file(dir / "trace.csv");
    CHECK(text.rfind("k,chosen_index,raw_cove,raw_unif,std_cove,std_unif,score,uncovered_remaining\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }
}

TEST_SUITE("set cover baseline") {
  TEST_CASE("a candidate covering everything") {
    const ScpResult r = greedy_scp_baseline(matrix_from(3, {{0}, {1}, {0, 1, 2}}), 10);
    CHECK(r.selected == std::vector<Eigen::Index>{2});
    CHECK(r.feasible());
  }

  TEST_CASE("greedy size is at least the exhaustive optimum") {
    // Greedy takes 0 first and then needs two more; {1, 2} covers all.
    const std::vector<std::vector<Eigen::Index>> cols = {{0, 1, 2}, {0, 3}, {1, 2}};
    const ScpResult r = greedy_scp_baseline(matrix_from(4, cols), 10);
    std::vector<std::vector<bool>> cover(4, std::vector<bool>(3, false));
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (Eigen::Index j : cols[i]) cover[static_cast<std::size_t>(j)][i] = true;
    const std::size_t optimum = oracle::optimal_cover_size(cover, 3);
    CHECK(optimum == 2);
    CHECK(r.selected.size() >= optimum);
    CHECK(r.uncovered.empty());
  }

  TEST_CASE("uncoverable samples are reported, not fatal") {
    const ScpResult r = greedy_scp_baseline(matrix_from(3, {{0}, {1}}), 10);
    CHECK_FALSE(r.feasible());
    CHECK(r.uncoverable == std::vector<Eigen::Index>{2});
    CHECK(r.selected.size() == 2);
  }

  TEST_CASE("max_points caps the cover") {
    const ScpResult r = greedy_scp_baseline(matrix_from(3, {{0}, {1}, {2}}), 2);
    CHECK(r.selected.size() == 2);
    CHECK(r.uncovered == std::vector<Eigen::Index>{2});
  }
}
