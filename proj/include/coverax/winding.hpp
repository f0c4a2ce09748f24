#pragma once

#include "coverax/mesh.hpp"

#include <variant>

namespace coverax {

/// Generalized winding number of a triangle set at q: the sum of signed
/// solid angles over 4*pi. Exact per-triangle summation.
double winding_number(const TriangleMesh& mesh, const Vec3& q);

/// Dipole approximation sum_i a_i n_i.(p_i - q) / (4 pi |p_i - q|^3).
/// Requires normals and areas (see estimate_point_areas).
double winding_number(const OrientedPointCloud& cloud, const Vec3& q);

/// Per-point area pi * d_k^2 / k, with d_k the distance to the k-th nearest
/// other point.
Eigen::VectorXd estimate_point_areas(const Points& points, int k = 8);

/// Fills in cloud.areas if missing. Throws MissingNormals without normals.
void prepare_cloud_winding(OrientedPointCloud& cloud, int k = 8);

using Shape = std::variant<TriangleMesh, OrientedPointCloud>;

double winding_number(const Shape& shape, const Vec3& q);
BoundingBox shape_bbox(const Shape& shape);

enum class DilationMode { Offset, Scale };

/// Interior candidate set P with radii R and dilated radii R'.
struct CandidateSet {
  Points points;
  Eigen::VectorXd radii;
  Eigen::VectorXd dilated_radii;
  DilationMode dilation_mode = DilationMode::Offset;
  double delta_r = 0.0;

  Eigen::Index size() const { return points.cols(); }
};

struct CandidateOptions {
  double inside_threshold = 0.5;
  std::uint64_t max_trials = 10'000'000;
  /// Abort once the running acceptance rate is below this after
  /// `rate_check_after` trials.
  double min_acceptance = 1e-4;
  std::uint64_t rate_check_after = 100'000;
};

/// Rejection sampling of n points uniform in the shape bbox with winding
/// number above the threshold. Radii are left empty.
CandidateSet generate_candidates(const Shape& shape, Eigen::Index n, std::uint64_t seed,
                                 const CandidateOptions& options = {});

}  // namespace coverax
