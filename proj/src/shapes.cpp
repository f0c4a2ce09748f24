#include "coverax/shapes.hpp"

#include <map>
#include <numbers>
#include <vector>

namespace coverax::shapes {

namespace {

struct Builder {
  std::vector<Vec3> v;
  std::vector<Eigen::Vector3i> f;

  int add(const Vec3& p) {
    v.push_back(p);
    return static_cast<int>(v.size()) - 1;
  }
  void tri(int a, int b, int c) { f.emplace_back(a, b, c); }
  void quad(int a, int b, int c, int d) {
    tri(a, b, c);
    tri(a, c, d);
  }

  TriangleMesh mesh() const {
    TriangleMesh m;
    m.vertices.resize(3, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m.vertices.col(static_cast<Eigen::Index>(i)) = v[i];
    m.triangles.resize(3, static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) m.triangles.col(static_cast<Eigen::Index>(i)) = f[i];
    m.drop_degenerate();
    return m;
  }
};

}  // namespace

TriangleMesh icosphere(int subdivisions, double radius, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Builder b;
  for (const Vec3& p : {Vec3(-1, t, 0), Vec3(1, t, 0), Vec3(-1, -t, 0), Vec3(1, -t, 0), Vec3(0, -1, t),
                        Vec3(0, 1, t), Vec3(0, -1, -t), Vec3(0, 1, -t), Vec3(t, 0, -1), Vec3(t, 0, 1),
                        Vec3(-t, 0, -1), Vec3(-t, 0, 1)}) {
    b.add(p.normalized());
  }
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (const auto& face : faces) b.tri(face[0], face[1], face[2]);

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int id = b.add((b.v[static_cast<std::size_t>(i)] + b.v[static_cast<std::size_t>(j)]).normalized());
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    for (const auto& face : b.f) {
      const int a = mid(face[0], face[1]), c = mid(face[1], face[2]), d = mid(face[2], face[0]);
      next.emplace_back(face[0], a, d);
      next.emplace_back(face[1], c, a);
      next.emplace_back(face[2], d, c);
      next.emplace_back(a, c, d);
    }
    b.f = std::move(next);
  }
  for (auto& p : b.v) p = center + radius * p;
  return b.mesh();
}

TriangleMesh ellipsoid(const Vec3& semi_axes, int subdivisions) {
  TriangleMesh m = icosphere(subdivisions);
  m.vertices = semi_axes.asDiagonal() * m.vertices;
  return m;
}

TriangleMesh tube(double radius, double length, int segments, int rings) {
  Builder b;
  auto ring_vertex = [&](int ring, int s) { return ring * segments + (s % segments); };
  for (int ring = 0; ring <= rings; ++ring) {
    const double x = length * ring / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      b.add(Vec3(x, radius * std::cos(phi), radius * std::sin(phi)));
    }
  }
  for (int ring = 0; ring < rings; ++ring) {
    for (int s = 0; s < segments; ++s) {
      b.quad(ring_vertex(ring, s), ring_vertex(ring, s + 1), ring_vertex(ring + 1, s + 1), ring_vertex(ring + 1, s));
    }
  }
  const int start = b.add(Vec3(0, 0, 0));
  const int end = b.add(Vec3(length, 0, 0));
  for (int s = 0; s < segments; ++s) {
    b.tri(start, ring_vertex(0, s + 1), ring_vertex(0, s));
    b.tri(end, ring_vertex(rings, s), ring_vertex(rings, s + 1));
  }
  return b.mesh();
}

TriangleMesh torus(double major, double minor, int major_segments, int minor_segments) {
  Builder b;
  auto id = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * std::numbers::pi * j / minor_segments;
      const double rr = major + minor * std::cos(v);
      b.add(Vec3(rr * std::cos(u), rr * std::sin(u), minor * std::sin(v)));
    }
  }
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) b.quad(id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  }
  return b.mesh();
}

TriangleMesh box(const Vec3& lo, const Vec3& hi) {
  Builder b;
  for (int k = 0; k < 8; ++k) {
    b.add(Vec3((k & 1) ? hi.x() : lo.x(), (k & 2) ? hi.y() : lo.y(), (k & 4) ? hi.z() : lo.z()));
  }
  b.quad(0, 2, 3, 1);  // z = lo
  b.quad(4, 5, 7, 6);  // z = hi
  b.quad(0, 1, 5, 4);  // y = lo
  b.quad(2, 6, 7, 3);  // y = hi
  b.quad(0, 4, 6, 2);  // x = lo
  b.quad(1, 3, 7, 5);  // x = hi
  return b.mesh();
}

TriangleMesh unit_cube() { return box(Vec3::Zero(), Vec3::Ones()); }

TriangleMesh l_bracket(double leg, double width, double depth) {
  const std::vector<Eigen::Vector2d> outline = {{0, 0}, {leg, 0}, {leg, width}, {width, width}, {width, leg}, {0, leg}};
  Builder b;
  const int n = static_cast<int>(outline.size());
  for (double z : {0.0, depth}) {
    for (const auto& p : outline) b.add(Vec3(p.x(), p.y(), z));
  }
  // The outline is star-shaped from vertex 0, so fans are valid.
  for (int k = 1; k + 1 < n; ++k) {
    b.tri(0, k + 1, k);
    b.tri(n, n + k, n + k + 1);
  }
  for (int k = 0; k < n; ++k) {
    const int k1 = (k + 1) % n;
    b.quad(k, k1, n + k1, n + k);
  }
  return b.mesh();
}

TriangleMesh two_ball_union(double radius, double separation, int subdivisions) {
  const Vec3 ca(-separation / 2, 0, 0), cb(separation / 2, 0, 0);
  const TriangleMesh a = icosphere(subdivisions, radius, ca);
  const TriangleMesh s = icosphere(subdivisions, radius, cb);
  Builder b;
  auto append = [&](const TriangleMesh& m, const Vec3& other) {
    const int base = static_cast<int>(b.v.size());
    for (Eigen::Index i = 0; i < m.vertex_count(); ++i) b.add(m.vertices.col(i));
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
      const Vec3 centroid = (m.corner(t, 0) + m.corner(t, 1) + m.corner(t, 2)) / 3.0;
      if ((centroid - other).norm() < radius) continue;
      b.tri(base + m.triangles(0, t), base + m.triangles(1, t), base + m.triangles(2, t));
    }
  };
  append(a, cb);
  append(s, ca);
  return b.mesh();
}

}  // namespace coverax::shapes
