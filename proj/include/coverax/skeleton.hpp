#pragma once

#include "coverax/regular_triangulation.hpp"

#include <filesystem>
#include <span>

namespace coverax {

/// A selected inner ball: center, undilated radius r and dilated radius r'.
struct MedialBall {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double dilated_radius = 0.0;
};

/// Medial skeleton: vertices (center, undilated radius), deduplicated edges
/// and triangles. Every triangle's edges are in the edge list.
struct Skeleton {
  Points centers;
  Eigen::VectorXd radii;
  std::vector<std::array<Eigen::Index, 2>> edges;
  std::vector<std::array<Eigen::Index, 3>> triangles;

  Eigen::Index vertex_count() const { return centers.cols(); }
  bool empty() const { return centers.cols() == 0; }
};

/// Inner balls weighted r'^2, surface samples weighted delta_r^2.
std::vector<WeightedPoint> make_weighted_points(std::span<const MedialBall> balls, const Points& samples,
                                                double delta_r);

/// Inner weights become (factor * r')^2; surface weights are unchanged.
std::vector<WeightedPoint> adjust_connection_radii(std::span<const WeightedPoint> points,
                                                   std::span<const MedialBall> balls, double factor);

/// Vertices are the balls (undilated radii); edges and triangles are the
/// RT simplices whose vertices are all inner-tagged.
Skeleton extract_skeleton(const RegularTriangulation& rt, std::span<const WeightedPoint> points,
                          std::span<const MedialBall> balls);

/// `.skel` text format: `skel <nv> <ne> <nt>`, then `v x y z r`, `e i j`,
/// `t i j k` lines (0-based).
void write_skel(const std::filesystem::path& path, const Skeleton& skeleton);
Skeleton read_skel(const std::filesystem::path& path);

}  // namespace coverax
