#include "coverax/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace coverax {

std::vector<WeightedPoint> make_weighted_points(std::span<const MedialBall> balls, const Points& samples,
                                                double delta_r) {
  std::vector<WeightedPoint> out;
  out.reserve(balls.size() + static_cast<std::size_t>(samples.cols()));
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const double r = balls[i].dilated_radius;
    out.push_back({balls[i].center, r * r, PointTag::Inner, static_cast<Eigen::Index>(i)});
  }
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    out.push_back({samples.col(j), delta_r * delta_r, PointTag::Surface, j});
  }
  return out;
}

std::vector<WeightedPoint> adjust_connection_radii(std::span<const WeightedPoint> points,
                                                   std::span<const MedialBall> balls, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorCode::NonpositiveFactor, "connection factor must be > 0");
  std::vector<WeightedPoint> out(points.begin(), points.end());
  for (auto& p : out) {
    if (p.tag != PointTag::Inner) continue;
    const double r = factor * balls[static_cast<std::size_t>(p.source_index)].dilated_radius;
    p.weight = r * r;
  }
  return out;
}

Skeleton extract_skeleton(const RegularTriangulation& rt, std::span<const WeightedPoint> points,
                          std::span<const MedialBall> balls) {
  Skeleton sk;
  sk.centers.resize(3, static_cast<Eigen::Index>(balls.size()));
  sk.radii.resize(static_cast<Eigen::Index>(balls.size()));
  for (std::size_t i = 0; i < balls.size(); ++i) {
    sk.centers.col(static_cast<Eigen::Index>(i)) = balls[i].center;
    sk.radii(static_cast<Eigen::Index>(i)) = balls[i].radius;
  }

  std::set<std::array<Eigen::Index, 2>> edges;
  std::set<std::array<Eigen::Index, 3>> triangles;
  std::vector<Eigen::Index> inner;
  for (const Tetrahedron& tet : rt.tetrahedra) {
    inner.clear();
    for (Eigen::Index v : tet) {
      const WeightedPoint& p = points[static_cast<std::size_t>(v)];
      if (p.tag == PointTag::Inner) inner.push_back(p.source_index);
    }
    std::sort(inner.begin(), inner.end());
    for (std::size_t a = 0; a < inner.size(); ++a) {
      for (std::size_t b = a + 1; b < inner.size(); ++b) {
        edges.insert({inner[a], inner[b]});
        for (std::size_t c = b + 1; c < inner.size(); ++c) triangles.insert({inner[a], inner[b], inner[c]});
      }
    }
  }
  sk.edges.assign(edges.begin(), edges.end());
  sk.triangles.assign(triangles.begin(), triangles.end());
  return sk;
}

void write_skel(const std::filesystem::path& path, const Skeleton& sk) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << "skel " << sk.vertex_count() << ' ' << sk.edges.size() << ' ' << sk.triangles.size() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < sk.vertex_count(); ++i) {
    out << "v " << sk.centers(0, i) << ' ' << sk.centers(1, i) << ' ' << sk.centers(2, i) << ' ' << sk.radii(i)
        << '\n';
  }
  for (const auto& e : sk.edges) out << "e " << e[0] << ' ' << e[1] << '\n';
  for (const auto& t : sk.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Skeleton read_skel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::ParseError, path.string() + ": " + what);
  };
  std::string tag;
  long nv = -1, ne = -1, nt = -1;
  if (!(in >> tag >> nv >> ne >> nt) || tag != "skel" || nv < 0 || ne < 0 || nt < 0) {
    throw fail("bad header");
  }
  Skeleton sk;
  sk.centers.resize(3, nv);
  sk.radii.resize(nv);
  for (long i = 0; i < nv; ++i) {
    if (!(in >> tag) || tag != "v" || !(in >> sk.centers(0, i) >> sk.centers(1, i) >> sk.centers(2, i) >> sk.radii(i))) {
      throw fail("bad vertex " + std::to_string(i));
    }
  }
  auto check = [&](Eigen::Index v) {
    if (v < 0 || v >= nv) throw fail("index out of range");
  };
  for (long i = 0; i < ne; ++i) {
    std::array<Eigen::Index, 2> e;
    if (!(in >> tag) || tag != "e" || !(in >> e[0] >> e[1])) throw fail("bad edge " + std::to_string(i));
    check(e[0]);
    check(e[1]);
    sk.edges.push_back(e);
  }
  for (long i = 0; i < nt; ++i) {
    std::array<Eigen::Index, 3> t;
    if (!(in >> tag) || tag != "t" || !(in >> t[0] >> t[1] >> t[2])) throw fail("bad triangle " + std::to_string(i));
    for (auto v : t) check(v);
    sk.triangles.push_back(t);
  }
  return sk;
}

}  // namespace coverax
