#include "coverax/winding.hpp"

#include "coverax/kdtree.hpp"

#include <cmath>
#include <numbers>

namespace coverax {

double winding_number(const TriangleMesh& mesh, const Vec3& q) {
  // Van Oosterom-Strackee: tan(omega/2) = a.(b x c) / (|a||b||c| + (a.b)|c| + (b.c)|a| + (c.a)|b|)
  double total = 0.0;
  const Eigen::Index nt = mesh.triangle_count();
  for (Eigen::Index t = 0; t < nt; ++t) {
    const Vec3 a = mesh.vertices.col(mesh.triangles(0, t)) - q;
    const Vec3 b = mesh.vertices.col(mesh.triangles(1, t)) - q;
    const Vec3 c = mesh.vertices.col(mesh.triangles(2, t)) - q;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

double winding_number(const OrientedPointCloud& cloud, const Vec3& q) {
  if (!cloud.normals) throw Error(ErrorCode::MissingNormals, "cloud winding number needs normals");
  if (!cloud.areas) throw Error(ErrorCode::UsageError, "cloud areas not prepared");
  const Points& n = *cloud.normals;
  const Eigen::VectorXd& area = *cloud.areas;
  double total = 0.0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const Vec3 d = cloud.points.col(i) - q;
    const double r = d.norm();
    if (r == 0.0) continue;
    total += area(i) * n.col(i).dot(d) / (r * r * r);
  }
  return total / (4.0 * std::numbers::pi);
}

Eigen::VectorXd estimate_point_areas(const Points& points, int k) {
  const KdTree tree(points);
  Eigen::VectorXd areas(points.cols());
  const Eigen::Index kk = std::min<Eigen::Index>(k + 1, points.cols());
  parallel_for(0, static_cast<std::size_t>(points.cols()), [&](std::size_t i) {
    const auto nn = tree.k_nearest(points.col(static_cast<Eigen::Index>(i)), kk);
    const double dk = nn.back().distance;
    areas(static_cast<Eigen::Index>(i)) = std::numbers::pi * dk * dk / static_cast<double>(kk - 1);
  });
  return areas;
}

void prepare_cloud_winding(OrientedPointCloud& cloud, int k) {
  if (!cloud.normals) throw Error(ErrorCode::MissingNormals, "cloud winding number needs normals");
  if (!cloud.areas) cloud.areas = estimate_point_areas(cloud.points, k);
}

double winding_number(const Shape& shape, const Vec3& q) {
  return std::visit([&](const auto& s) { return winding_number(s, q); }, shape);
}

BoundingBox shape_bbox(const Shape& shape) {
  return std::visit([](const auto& s) { return s.bbox(); }, shape);
}

CandidateSet generate_candidates(const Shape& input, Eigen::Index n, std::uint64_t seed,
                                 const CandidateOptions& options) {
  if (n < 1) throw Error(ErrorCode::UsageError, "candidate count must be >= 1");
  const Shape* shape = &input;
  Shape prepared;
  if (const auto* cloud = std::get_if<OrientedPointCloud>(&input)) {
    if (!cloud->normals) {
      throw Error(ErrorCode::MissingNormals,
                  "point cloud has no normals; supply candidates from a file instead");
    }
    if (!cloud->areas) {
      OrientedPointCloud copy = *cloud;
      prepare_cloud_winding(copy);
      prepared = std::move(copy);
      shape = &prepared;
    }
  }
  const BoundingBox box = shape_bbox(*shape);
  if (box.empty()) throw Error(ErrorCode::EmptyShape, "empty shape");

  CandidateSet out;
  std::vector<double> accepted;
  accepted.reserve(static_cast<std::size_t>(n) * 3);
  Rng rng(seed);
  std::uint64_t trials = 0, hits = 0;

  // Trial points come from the RNG in a fixed order; the batch is evaluated
  // in parallel and accepted in order, so results do not depend on threads.
  const std::size_t batch = 4096;
  std::vector<Vec3> trial(batch);
  std::vector<double> wn(batch);
  while (static_cast<Eigen::Index>(accepted.size() / 3) < n) {
    const std::size_t count =
        static_cast<std::size_t>(std::min<std::uint64_t>(batch, options.max_trials - trials));
    if (count == 0) break;
    for (std::size_t b = 0; b < count; ++b) {
      for (int d = 0; d < 3; ++d) trial[b][d] = rng.uniform(box.min[d], box.max[d]);
    }
    parallel_for(0, count, [&](std::size_t b) { wn[b] = winding_number(*shape, trial[b]); });
    for (std::size_t b = 0; b < count; ++b) {
      ++trials;
      if (wn[b] > options.inside_threshold) {
        ++hits;
        if (static_cast<Eigen::Index>(accepted.size() / 3) < n) {
          accepted.insert(accepted.end(), {trial[b].x(), trial[b].y(), trial[b].z()});
        }
      }
    }
    if (trials >= options.rate_check_after &&
        static_cast<double>(hits) < options.min_acceptance * static_cast<double>(trials)) {
      break;
    }
  }
  if (static_cast<Eigen::Index>(accepted.size() / 3) < n) {
    throw Error(ErrorCode::RejectionStarvation,
                "accepted " + std::to_string(hits) + " of " + std::to_string(trials) +
                    " trial points; interior volume too small");
  }
  out.points.resize(3, n);
  std::copy(accepted.begin(), accepted.end(), out.points.data());
  return out;
}

}  // namespace coverax
