#pragma once

#include "coverax/common.hpp"

#include <utility>
#include <vector>

namespace coverax {

struct Neighbor {
  double distance = 0.0;
  Eigen::Index index = -1;
};

/// Exact static kd-tree over a 3D point set. Queries are read-only and safe
/// to run concurrently. All distance ties resolve to the lowest point index.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(Points points, Eigen::Index leaf_size = 8);

  Eigen::Index size() const { return points_.cols(); }
  const Points& points() const { return points_; }

  Neighbor nearest(const Vec3& q) const;
  /// The k nearest points sorted by (distance, index).
  std::vector<Neighbor> k_nearest(const Vec3& q, Eigen::Index k) const;
  /// Indices i with (points[i] - q).norm() <= radius, ascending.
  std::vector<Eigen::Index> within(const Vec3& q, double radius) const;

 private:
  struct Node {
    Vec3 lo, hi;
    Eigen::Index begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(Eigen::Index begin, Eigen::Index end);
  static double box_distance2(const Node& node, const Vec3& q);

  Points points_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
  Eigen::Index leaf_size_ = 8;
};

/// Exact nearest neighbor in `target` for a single query.
Neighbor nearest_distance(const Vec3& query, const KdTree& target);

}  // namespace coverax
