#include "coverax/mesh.hpp"
#include "coverax/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace coverax {

NormalizeTransform normalizing_transform(const BoundingBox& box) {
  if (box.empty()) throw Error(ErrorCode::EmptyShape, "cannot normalize an empty shape");
  const double longest = box.extent().maxCoeff();
  if (!(longest > 0.0)) throw Error(ErrorCode::EmptyShape, "degenerate bounding box");
  NormalizeTransform t;
  t.origin = box.min;
  t.scale = 1.0 / longest;
  return t;
}

TriangleMesh normalize_shape(const TriangleMesh& mesh, NormalizeTransform& transform) {
  if (mesh.triangle_count() == 0) throw Error(ErrorCode::EmptyShape, "mesh has no triangles");
  transform = normalizing_transform(mesh.bbox());
  TriangleMesh out = mesh;
  if (!transform.is_identity()) out.vertices = transform.apply(mesh.vertices);
  return out;
}

OrientedPointCloud normalize_shape(const OrientedPointCloud& cloud, NormalizeTransform& transform) {
  transform = normalizing_transform(cloud.bbox());
  OrientedPointCloud out = cloud;
  if (!transform.is_identity()) {
    out.points = transform.apply(cloud.points);
    if (out.areas) *out.areas *= transform.scale * transform.scale;
  }
  return out;
}

SurfaceSamples sample_surface(const TriangleMesh& mesh, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::UsageError, "sample count must be >= 1");
  const Eigen::Index nt = mesh.triangle_count();
  if (nt == 0) throw Error(ErrorCode::EmptyShape, "mesh has no triangles");

  std::vector<double> cdf(static_cast<std::size_t>(nt));
  double total = 0.0;
  for (Eigen::Index t = 0; t < nt; ++t) {
    total += mesh.area(t);
    cdf[static_cast<std::size_t>(t)] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyShape, "mesh has zero area");

  SurfaceSamples out;
  out.source = SampleSource::Mesh;
  out.seed = seed;
  out.points.resize(3, m);
  out.provenance.resize(static_cast<std::size_t>(m));
  Rng rng(seed);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto t = static_cast<Eigen::Index>(std::min<std::ptrdiff_t>(it - cdf.begin(), nt - 1));
    double r1 = rng.uniform();
    double r2 = rng.uniform();
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Vec3 a = mesh.corner(t, 0);
    out.points.col(j) = a + r1 * (mesh.corner(t, 1) - a) + r2 * (mesh.corner(t, 2) - a);
    out.provenance[static_cast<std::size_t>(j)] = t;
  }
  return out;
}

SurfaceSamples sample_surface(const OrientedPointCloud& cloud, Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::UsageError, "sample count must be >= 1");
  if (cloud.size() == 0) throw Error(ErrorCode::EmptyShape, "empty point cloud");
  const Eigen::Index count = std::min(m, cloud.size());

  // Partial Fisher-Yates over the index range.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cloud.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto pick = static_cast<std::size_t>(k) + rng.index(order.size() - static_cast<std::size_t>(k));
    std::swap(order[static_cast<std::size_t>(k)], order[pick]);
  }
  order.resize(static_cast<std::size_t>(count));

  SurfaceSamples out;
  out.source = SampleSource::Cloud;
  out.seed = seed;
  out.points.resize(3, count);
  for (Eigen::Index j = 0; j < count; ++j) out.points.col(j) = cloud.points.col(order[static_cast<std::size_t>(j)]);
  out.provenance = std::move(order);
  return out;
}

}  // namespace coverax
