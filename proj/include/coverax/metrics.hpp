#pragma once

#include "coverax/envelope.hpp"
#include "coverax/mesh_distance.hpp"

namespace coverax {

/// Hausdorff errors normalized by the bbox diagonal, plus coverage rate.
struct ErrorReport {
  double eps_s2r = 0.0;        // surface -> reconstruction
  double eps_r2s = 0.0;        // reconstruction -> surface
  double eps_two_sided = 0.0;  // max of the two
  double coverage_rate = 0.0;
  double bbox_diagonal = 0.0;
  Eigen::Index m_surface = 0;
  Eigen::Index m_envelope = 0;
};

/// eps_s2r = max |envelope distance| over the surface samples,
/// eps_r2s = max distance from envelope samples to the surface, both divided
/// by bbox_diagonal. The surface is `surface` when given (exact triangle
/// distance) and the sample set otherwise.
ErrorReport hausdorff_errors(const Points& surface_samples, const Skeleton& skeleton, Eigen::Index m_envelope,
                             std::uint64_t seed, double bbox_diagonal, const MeshDistance* surface = nullptr);

/// Fraction of samples inside at least one ball of dilated radius.
double coverage_rate(const Points& samples, std::span<const MedialBall> balls);

}  // namespace coverax
