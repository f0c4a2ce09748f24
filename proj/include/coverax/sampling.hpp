#pragma once

#include "coverax/mesh.hpp"

#include <vector>

namespace coverax {

enum class SampleSource { Mesh, Cloud };

/// The boundary sample set S.
struct SurfaceSamples {
  Points points;
  SampleSource source = SampleSource::Mesh;
  std::uint64_t seed = 0;
  /// Triangle index (mesh) or input point index (cloud) per sample.
  std::vector<Eigen::Index> provenance;

  Eigen::Index size() const { return points.cols(); }
};

/// Area-weighted uniform sampling: triangle with probability proportional to
/// its area, then a uniform barycentric point.
SurfaceSamples sample_surface(const TriangleMesh& mesh, Eigen::Index m, std::uint64_t seed);

/// Seeded subset of min(m, cloud size) distinct cloud points.
SurfaceSamples sample_surface(const OrientedPointCloud& cloud, Eigen::Index m, std::uint64_t seed);

}  // namespace coverax
