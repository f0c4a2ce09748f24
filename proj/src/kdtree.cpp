#include "coverax/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace coverax {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

}  // namespace

KdTree::KdTree(Points points, Eigen::Index leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<Eigen::Index>(1, leaf_size)) {
  order_.resize(static_cast<std::size_t>(points_.cols()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  if (points_.cols() > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * points_.cols() / leaf_size_ + 2));
    build(0, points_.cols());
  }
}

int KdTree::build(Eigen::Index begin, Eigen::Index end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  for (Eigen::Index k = begin; k < end; ++k) {
    const auto p = points_.col(order_[static_cast<std::size_t>(k)]);
    node.lo = node.lo.cwiseMin(p);
    node.hi = node.hi.cwiseMax(p);
  }
  if (end - begin > leaf_size_) {
    int axis;
    (node.hi - node.lo).maxCoeff(&axis);
    const Eigen::Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) {
                       const double pa = points_(axis, a), pb = points_(axis, b);
                       return pa < pb || (pa == pb && a < b);
                     });
    node.left = build(begin, mid);
    node.right = build(mid, end);
  }
  nodes_[static_cast<std::size_t>(id)] = node;
  return id;
}

double KdTree::box_distance2(const Node& node, const Vec3& q) {
  const Vec3 d = (node.lo - q).cwiseMax(q - node.hi).cwiseMax(0.0);
  return d.squaredNorm();
}

Neighbor KdTree::nearest(const Vec3& q) const {
  if (size() == 0) throw Error(ErrorCode::EmptySet, "nearest neighbor query on empty set");
  return k_nearest(q, 1).front();
}

std::vector<Neighbor> KdTree::k_nearest(const Vec3& q, Eigen::Index k) const {
  if (size() == 0) throw Error(ErrorCode::EmptySet, "nearest neighbor query on empty set");
  k = std::min(k, size());
  // Max-heap of the best k so far, worst on top.
  auto worse = [](const Neighbor& a, const Neighbor& b) { return closer(a, b); };
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(worse);
  // Bound pruning uses squared box distance against the current k-th
  // distance; a box exactly at the bound is still visited so ties can be
  // resolved by index.
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (static_cast<Eigen::Index>(best.size()) == k) {
      const double bound = best.top().distance;
      if (std::sqrt(box_distance2(node, q)) > bound) continue;
    }
    if (node.left < 0) {
      for (Eigen::Index s = node.begin; s < node.end; ++s) {
        const Eigen::Index i = order_[static_cast<std::size_t>(s)];
        const Neighbor cand{(points_.col(i) - q).norm(), i};
        if (static_cast<Eigen::Index>(best.size()) < k) {
          best.push(cand);
        } else if (closer(cand, best.top())) {
          best.pop();
          best.push(cand);
        }
      }
      continue;
    }
    const double dl = box_distance2(nodes_[static_cast<std::size_t>(node.left)], q);
    const double dr = box_distance2(nodes_[static_cast<std::size_t>(node.right)], q);
    // Push the farther child first so the nearer one is explored next.
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::vector<Neighbor> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Eigen::Index> KdTree::within(const Vec3& q, double radius) const {
  std::vector<Eigen::Index> out;
  if (size() == 0 || radius < 0.0) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (std::sqrt(box_distance2(node, q)) > radius * (1.0 + 1e-12)) continue;
    if (node.left < 0) {
      for (Eigen::Index s = node.begin; s < node.end; ++s) {
        const Eigen::Index i = order_[static_cast<std::size_t>(s)];
        if ((points_.col(i) - q).norm() <= radius) out.push_back(i);
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Neighbor nearest_distance(const Vec3& query, const KdTree& target) { return target.nearest(query); }

}  // namespace coverax
