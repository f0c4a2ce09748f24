#include "coverax/mesh_distance.hpp"

#include <algorithm>
#include <numeric>

namespace coverax {

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

MeshDistance::MeshDistance(const TriangleMesh& mesh) {
  if (mesh.triangle_count() == 0) throw Error(ErrorCode::EmptyShape, "mesh has no triangles");
  triangles_.reserve(static_cast<std::size_t>(mesh.triangle_count()));
  for (Eigen::Index t = 0; t < mesh.triangle_count(); ++t) {
    triangles_.push_back({mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)});
  }
  order_.resize(triangles_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * triangles_.size() / 4 + 1);
  build(0, static_cast<int>(order_.size()));
}

int MeshDistance::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (int i = begin; i < end; ++i) {
    for (const Vec3& v : triangles_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])]) {
      node.lo = node.lo.cwiseMin(v);
      node.hi = node.hi.cwiseMax(v);
    }
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 4) return id;

  int axis;
  (node.hi - node.lo).maxCoeff(&axis);
  auto centroid = [&](int t) {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    return tri[0](axis) + tri[1](axis) + tri[2](axis);
  };
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int x, int y) { return centroid(x) < centroid(y) || (centroid(x) == centroid(y) && x < y); });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double MeshDistance::distance(const Vec3& q) const {
  auto box2 = [&](const Node& n) { return (n.lo - q).cwiseMax(q - n.hi).cwiseMax(0.0).squaredNorm(); };
  double best2 = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box2(node) >= best2) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const auto& t = triangles_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
        best2 = std::min(best2, (closest_point_on_triangle(q, t[0], t[1], t[2]) - q).squaredNorm());
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    // Visit the nearer child first.
    if (box2(l) < box2(r)) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best2);
}

}  // namespace coverax
