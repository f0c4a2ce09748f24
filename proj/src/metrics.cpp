#include "coverax/metrics.hpp"

#include "coverax/kdtree.hpp"
#include "coverax/selection.hpp"

namespace coverax {

ErrorReport hausdorff_errors(const Points& surface_samples, const Skeleton& skeleton, Eigen::Index m_envelope,
                             std::uint64_t seed, double bbox_diagonal, const MeshDistance* surface) {
  if (skeleton.empty()) throw Error(ErrorCode::EmptySkeleton, "skeleton has no vertices");
  if (surface_samples.cols() == 0) throw Error(ErrorCode::EmptySet, "no surface samples");
  if (!(bbox_diagonal > 0.0)) throw Error(ErrorCode::EmptyShape, "bbox diagonal must be positive");

  const Envelope envelope(skeleton);
  std::vector<double> to_envelope(static_cast<std::size_t>(surface_samples.cols()));
  parallel_for(0, to_envelope.size(), [&](std::size_t j) {
    to_envelope[j] = std::abs(envelope.distance(surface_samples.col(static_cast<Eigen::Index>(j))));
  });

  const Points env = sample_envelope(skeleton, m_envelope, seed);
  std::vector<double> to_surface(static_cast<std::size_t>(env.cols()));
  if (surface) {
    parallel_for(0, to_surface.size(), [&](std::size_t i) {
      to_surface[i] = surface->distance(env.col(static_cast<Eigen::Index>(i)));
    });
  } else {
    const KdTree tree(surface_samples);
    parallel_for(0, to_surface.size(), [&](std::size_t i) {
      to_surface[i] = tree.nearest(env.col(static_cast<Eigen::Index>(i))).distance;
    });
  }

  ErrorReport report;
  report.bbox_diagonal = bbox_diagonal;
  report.eps_s2r = *std::max_element(to_envelope.begin(), to_envelope.end()) / bbox_diagonal;
  report.eps_r2s = *std::max_element(to_surface.begin(), to_surface.end()) / bbox_diagonal;
  report.eps_two_sided = std::max(report.eps_s2r, report.eps_r2s);
  report.m_surface = surface_samples.cols();
  report.m_envelope = env.cols();
  return report;
}

double coverage_rate(const Points& samples, std::span<const MedialBall> balls) {
  if (samples.cols() == 0) throw Error(ErrorCode::EmptySet, "no samples");
  Eigen::Index covered = 0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (const auto& b : balls) {
      if (ball_covers(b.center, b.dilated_radius, samples.col(j))) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(samples.cols());
}

}  // namespace coverax
