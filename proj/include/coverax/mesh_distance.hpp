#pragma once

#include "coverax/mesh.hpp"

#include <vector>

namespace coverax {

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Exact unsigned distance to a triangle set through an AABB tree.
class MeshDistance {
 public:
  explicit MeshDistance(const TriangleMesh& mesh);

  double distance(const Vec3& q) const;

 private:
  struct Node {
    Vec3 lo, hi;
    int begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(int begin, int end);

  std::vector<std::array<Vec3, 3>> triangles_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace coverax
