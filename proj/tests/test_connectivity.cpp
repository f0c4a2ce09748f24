#include "coverax/kdtree.hpp"
#include "coverax/predicates.hpp"
#include "coverax/sampling.hpp"
#include "coverax/selection.hpp"
#include "coverax/shapes.hpp"
#include "coverax/skeleton.hpp"
#include "oracles/brute_force_rt.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace coverax;

namespace {

std::vector<WeightedPoint> random_weighted(Rng& rng, int n, double max_weight) {
  std::vector<WeightedPoint> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back({Vec3(rng.uniform(), rng.uniform(), rng.uniform()), rng.uniform(0.0, max_weight), PointTag::Surface, i});
  }
  return pts;
}

std::vector<oracle::Tet> as_oracle(const std::vector<Tetrahedron>& tets) {
  std::vector<oracle::Tet> out;
  for (const auto& t : tets) out.push_back({t[0], t[1], t[2], t[3]});
  return out;
}

// Orthocenter power check in long double: every other point has power at
// least the tetrahedron's own power minus tol.
bool empty_orthospheres(const RegularTriangulation& rt, long double tol) {
  using L = long double;
  using V3 = Eigen::Matrix<L, 3, 1>;
  for (const auto& t : rt.tetrahedra) {
    Eigen::Matrix<L, 3, 3> A;
    Eigen::Matrix<L, 3, 1> rhs;
    const V3 p0 = rt.positions.col(t[0]).cast<L>();
    for (int r = 0; r < 3; ++r) {
      const V3 p = rt.positions.col(t[static_cast<std::size_t>(r + 1)]).cast<L>();
      A.row(r) = (2 * (p - p0)).transpose();
      rhs(r) = p.squaredNorm() - p0.squaredNorm() - (L(rt.weights(t[static_cast<std::size_t>(r + 1)])) - L(rt.weights(t[0])));
    }
    const V3 c = A.fullPivLu().solve(rhs);
    const L own = (c - p0).squaredNorm() - L(rt.weights(t[0]));
    for (Eigen::Index q = 0; q < rt.positions.cols(); ++q) {
      if ((c - rt.positions.col(q).cast<L>()).squaredNorm() - L(rt.weights(q)) < own - tol) return false;
    }
  }
  return true;
}

std::map<Eigen::Index, int> degrees(const Skeleton& sk) {
  std::map<Eigen::Index, int> deg;
  for (const auto& e : sk.edges) {
    ++deg[e[0]];
    ++deg[e[1]];
  }
  return deg;
}

}  // namespace

TEST_SUITE("predicates") {
  TEST_CASE("orientation sign and exact zero on coplanar points") {
    const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
    CHECK(predicates::orient3d(a, b, c, Vec3(0, 0, 1)) > 0);
    CHECK(predicates::orient3d(a, b, c, Vec3(0, 0, -1)) < 0);
    CHECK(predicates::orient3d(a, b, c, Vec3(0.3, 0.7, 0)) == 0);
    // Nearly coplanar values beyond double filter reach must still be exact.
    CHECK(predicates::orient3d(Vec3(0.1, 0.1, 0.1), Vec3(0.2, 0.2, 0.2), Vec3(0.3, 0.3, 0.3), Vec3(0.1, 0.7, 0.2)) == 0);
  }
}

TEST_SUITE("regular triangulation") {
  TEST_CASE("four points in general position give one tetrahedron") {
    const std::vector<WeightedPoint> pts = {{Vec3(0, 0, 0), 0, PointTag::Surface, 0},
                                            {Vec3(1, 0, 0), 0, PointTag::Surface, 1},
                                            {Vec3(0, 1, 0), 0, PointTag::Surface, 2},
                                            {Vec3(0, 0, 1), 0, PointTag::Surface, 3}};
    const RegularTriangulation rt = regular_triangulation(pts);
    REQUIRE(rt.tetrahedra.size() == 1);
    CHECK(rt.tetrahedra[0] == Tetrahedron{0, 1, 2, 3});
    CHECK_FALSE(rt.perturbed);
  }

  TEST_CASE("weighted instances match brute-force orthosphere enumeration") {
    Rng rng(10);
    for (int instance = 0; instance < 60; ++instance) {
      const int n = 5 + static_cast<int>(rng.index(6));
      const auto pts = random_weighted(rng, n, 0.05);
      const RegularTriangulation rt = regular_triangulation(pts, static_cast<std::uint64_t>(instance));
      CAPTURE(instance);
      CHECK_FALSE(rt.tetrahedra.empty());
      CHECK(as_oracle(rt.tetrahedra) == oracle::brute_force_regular(rt.positions, rt.weights));
    }
  }

  TEST_CASE("equal weights give the Delaunay triangulation") {
    Rng rng(11);
    for (int instance = 0; instance < 40; ++instance) {
      const int n = 5 + static_cast<int>(rng.index(8));
      auto pts = random_weighted(rng, n, 0.0);
      for (auto& p : pts) p.weight = 0.01;
      const RegularTriangulation rt = regular_triangulation(pts);
      Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
      CHECK(as_oracle(rt.tetrahedra) == oracle::brute_force_regular(rt.positions, zero));
    }
  }

  TEST_CASE("cospherical cube corners are perturbed and still valid") {
    std::vector<WeightedPoint> pts;
    for (int k = 0; k < 8; ++k) pts.push_back({Vec3(k & 1, (k >> 1) & 1, (k >> 2) & 1), 0.0, PointTag::Surface, k});
    const RegularTriangulation rt = regular_triangulation(pts, 42);
    CHECK(rt.perturbed);
    CHECK(rt.perturbation_magnitude > 0.0);
    for (int k = 0; k < 8; ++k) {
      const double moved = (Vec3(rt.positions.col(k)) - pts[static_cast<std::size_t>(k)].position).norm();
      CHECK(moved <= 1e-8);
    }
    CHECK(as_oracle(rt.tetrahedra) == oracle::brute_force_regular(rt.positions, rt.weights));
    double volume = 0.0;
    for (const auto& t : rt.tetrahedra) {
      const Vec3 a = rt.positions.col(t[0]);
      volume += std::abs((Vec3(rt.positions.col(t[1])) - a).dot(
                             (Vec3(rt.positions.col(t[2])) - a).cross(Vec3(rt.positions.col(t[3])) - a))) / 6.0;
    }
    CHECK(volume == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(regular_triangulation(pts, 42).tetrahedra == rt.tetrahedra);
  }

  TEST_CASE("coplanar or tiny inputs are rejected") {
    std::vector<WeightedPoint> flat;
    for (int k = 0; k < 6; ++k) flat.push_back({Vec3(k, k * k, 0), 0.0, PointTag::Surface, k});
    CHECK_THROWS_AS(regular_triangulation(flat), Error);
    CHECK_THROWS_AS(regular_triangulation(std::span<const WeightedPoint>(flat.data(), 3)), Error);
  }

  TEST_CASE("a submerged point is redundant") {
    std::vector<WeightedPoint> pts = {{Vec3(0, 0, 0), 0, PointTag::Surface, 0},
                                      {Vec3(4, 0, 0), 0, PointTag::Surface, 1},
                                      {Vec3(0, 4, 0), 0, PointTag::Surface, 2},
                                      {Vec3(0, 0, 4), 0, PointTag::Surface, 3},
                                      {Vec3(1, 1, 1), 4.0, PointTag::Inner, 0},
                                      {Vec3(1.1, 1, 1), 0.0, PointTag::Inner, 1}};
    const RegularTriangulation rt = regular_triangulation(pts);
    CHECK(rt.redundant == std::vector<Eigen::Index>{5});
    for (const auto& t : rt.tetrahedra) CHECK(std::find(t.begin(), t.end(), 5) == t.end());
    CHECK(as_oracle(rt.tetrahedra) == oracle::brute_force_regular(rt.positions, rt.weights));
  }

  TEST_CASE("empty orthospheres on a larger instance") {
    Rng rng(12);
    const auto pts = random_weighted(rng, 400, 0.002);
    const RegularTriangulation rt = regular_triangulation(pts);
    CHECK(rt.tetrahedra.size() > 400);
    CHECK(empty_orthospheres(rt, 1e-9L));
  }
}

TEST_SUITE("skeleton extraction") {
  TEST_CASE("inner-only edges and triangles") {
    Rng rng(13);
    const Points samples = sample_surface(shapes::icosphere(2, 0.5, Vec3::Constant(0.5)), 300, 1).points;
    std::vector<MedialBall> balls;
    for (const Vec3& c : {Vec3(0.4, 0.5, 0.5), Vec3(0.6, 0.5, 0.5), Vec3(0.5, 0.62, 0.5), Vec3(0.5, 0.5, 0.6)}) {
      const double r = compute_radii(Points(c), samples)(0);
      balls.push_back({c, r, r + 0.02});
    }
    const auto weighted = make_weighted_points(balls, samples, 0.02);
    REQUIRE(weighted.size() == 304);
    CHECK(weighted[0].tag == PointTag::Inner);
    CHECK(weighted[0].weight == doctest::Approx(balls[0].dilated_radius * balls[0].dilated_radius));
    CHECK(weighted[4].weight == doctest::Approx(0.0004));
    const RegularTriangulation rt = regular_triangulation(weighted);
    const Skeleton sk = extract_skeleton(rt, weighted, balls);
    CHECK(sk.vertex_count() == 4);
    CHECK(sk.radii(0) == balls[0].radius);
    CHECK(sk.edges.size() == 6);
    std::set<std::array<Eigen::Index, 2>> edges(sk.edges.begin(), sk.edges.end());
    CHECK(edges.size() == sk.edges.size());
    for (const auto& t : sk.triangles) {
      CHECK(edges.count({t[0], t[1]}) == 1);
      CHECK(edges.count({t[1], t[2]}) == 1);
      CHECK(edges.count({t[0], t[2]}) == 1);
    }
    for (const auto& e : sk.edges) {
      CHECK(e[0] < e[1]);
      CHECK(e[1] < 4);
    }
  }

  TEST_CASE("separated balls stay isolated") {
    const Points samples = sample_surface(shapes::box(Vec3::Zero(), Vec3(4, 1, 1)), 800, 2).points;
    std::vector<MedialBall> balls = {{Vec3(0.5, 0.5, 0.5), 0.1, 0.12}, {Vec3(3.5, 0.5, 0.5), 0.1, 0.12}};
    const auto weighted = make_weighted_points(balls, samples, 0.02);
    const Skeleton sk = extract_skeleton(regular_triangulation(weighted), weighted, balls);
    CHECK(sk.vertex_count() == 2);
    CHECK(sk.edges.empty());
    CHECK(sk.triangles.empty());
  }

  TEST_CASE("balls along a straight tube form a path") {
    NormalizeTransform t;
    const TriangleMesh tube = normalize_shape(shapes::tube(0.25, 2.0), t);
    const Points samples = sample_surface(tube, 1500, 3).points;
    std::vector<MedialBall> balls;
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const Vec3 c(x, 0.125, 0.125);
      const double r = compute_radii(Points(c), samples)(0);
      balls.push_back({c, r, r + 0.02});
    }
    const auto weighted = make_weighted_points(balls, samples, 0.02);
    const Skeleton sk = extract_skeleton(regular_triangulation(weighted), weighted, balls);
    CHECK(sk.edges.size() == 4);
    for (const auto& [v, d] : degrees(sk)) CHECK(d <= 2);
    for (const auto& e : sk.edges) CHECK(e[1] == e[0] + 1);
  }

  TEST_CASE("connection factor") {
    const Points samples = sample_surface(shapes::torus(0.35, 0.1, 24, 12), 600, 4).points;
    Rng rng(14);
    std::vector<MedialBall> balls;
    for (int k = 0; k < 12; ++k) {
      const double a = 2 * 3.141592653589793 * k / 12 + rng.uniform(-0.1, 0.1);
      const Vec3 c(0.35 * std::cos(a), 0.35 * std::sin(a), rng.uniform(-0.02, 0.02));
      const double r = compute_radii(Points(c), samples)(0);
      balls.push_back({c, r, r + 0.02});
    }
    const auto weighted = make_weighted_points(balls, samples, 0.02);
    const auto same = adjust_connection_radii(weighted, balls, 1.0);
    for (std::size_t i = 0; i < weighted.size(); ++i) CHECK(same[i].weight == weighted[i].weight);
    std::vector<MedialBall> one = {{Vec3::Zero(), 0.08, 0.1}};
    std::vector<WeightedPoint> single = {{Vec3::Zero(), 0.01, PointTag::Inner, 0}};
    CHECK(adjust_connection_radii(single, one, 2.0)[0].weight == doctest::Approx(0.04));
    try {
      adjust_connection_radii(weighted, balls, 0.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonpositiveFactor);
    }
    std::size_t previous = 0;
    for (double factor : {1.0, 1.5, 2.0}) {
      const auto adjusted = adjust_connection_radii(weighted, balls, factor);
      const Skeleton sk = extract_skeleton(regular_triangulation(adjusted), adjusted, balls);
      CAPTURE(factor);
      CHECK(sk.edges.size() >= previous);
      previous = sk.edges.size();
    }
    CHECK(previous >= 12);
  }

  TEST_CASE("skel files round-trip and reject garbage") {
    Skeleton sk;
    sk.centers = Points::Random(3, 3);
    sk.radii = Eigen::Vector3d(0.1, 0.2, 1.0 / 3.0);
    sk.edges = {{0, 1}, {0, 2}, {1, 2}};
    sk.triangles = {{0, 1, 2}};
    const auto dir = test::scratch_dir("skel");
    write_skel(dir / "a.skel", sk);
    const Skeleton back = read_skel(dir / "a.skel");
    CHECK(back.centers == sk.centers);
    CHECK(back.radii == sk.radii);
    CHECK(back.edges == sk.edges);
    CHECK(back.triangles == sk.triangles);
    CHECK(test::read_file(dir / "a.skel").rfind("skel 3 3 1\n", 0) == 0);
    CHECK_THROWS_AS(read_skel(test::write_file(dir / "b.skel", "skel 1 1 0\nv 0 0 0 1\ne 0 4\n")), Error);
    CHECK_THROWS_AS(read_skel(test::write_file(dir / "c.skel", "mesh 1 0 0\n")), Error);
  }
}
