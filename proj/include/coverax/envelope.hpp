#pragma once

#include "coverax/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace coverax {

// Signed distance-like functions of swept balls: min over the interpolation
// parameter of |q - c| - r, negative inside.

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
Scalar sphere_distance(const Vector3<Scalar>& q, const Vector3<Scalar>& c, Scalar r) {
  return (q - c).norm() - r;
}

/// Two balls with centers and radii interpolated linearly, t in [0, 1].
template <typename Scalar>
Scalar cone_distance(const Vector3<Scalar>& q, const Vector3<Scalar>& c1, Scalar r1,
                     const Vector3<Scalar>& c2, Scalar r2) {
  const Vector3<Scalar> d = c2 - c1;
  const Scalar length = d.norm();
  const Scalar dr = r2 - r1;
  if (length <= std::abs(dr)) {
    // One ball contains the other; the minimum sits at an end.
    return std::min(sphere_distance(q, c1, r1), sphere_distance(q, c2, r2));
  }
  const Vector3<Scalar> e = q - c1;
  const Scalar along = e.dot(d) / length;
  const Scalar h = std::sqrt(std::max(Scalar(0), e.squaredNorm() - along * along));
  const Scalar k = dr / length;
  const Scalar x = along + k * h / std::sqrt(Scalar(1) - k * k);
  const Scalar t = std::clamp(x / length, Scalar(0), Scalar(1));
  return (q - (c1 + t * d)).norm() - (r1 + t * dr);
}

/// Three balls interpolated over barycentric (u, v, w) >= 0. Falls back to
/// the edge cones when the unconstrained minimizer leaves the triangle or
/// the centers are collinear.
template <typename Scalar>
Scalar slab_distance(const Vector3<Scalar>& q, const Vector3<Scalar>& c1, Scalar r1, const Vector3<Scalar>& c2,
                     Scalar r2, const Vector3<Scalar>& c3, Scalar r3) {
  auto edges = [&] {
    return std::min({cone_distance(q, c1, r1, c2, r2), cone_distance(q, c2, r2, c3, r3),
                     cone_distance(q, c1, r1, c3, r3)});
  };
  const Vector3<Scalar> e1 = c2 - c1, e2 = c3 - c1;
  const Scalar g00 = e1.dot(e1), g01 = e1.dot(e2), g11 = e2.dot(e2);
  const Scalar det = g00 * g11 - g01 * g01;
  if (!(det > Scalar(1e-14) * g00 * g11)) return edges();
  const Scalar d1 = r2 - r1, d2 = r3 - r1;
  // In-plane gradient of the interpolated radius.
  const Scalar alpha = (g11 * d1 - g01 * d2) / det;
  const Scalar beta = (g00 * d2 - g01 * d1) / det;
  const Scalar grad2 = alpha * d1 + beta * d2;
  if (grad2 >= Scalar(1)) return edges();
  const Vector3<Scalar> grad = alpha * e1 + beta * e2;
  const Vector3<Scalar> normal = e1.cross(e2).normalized();
  const Scalar h = (q - c1).dot(normal);
  const Vector3<Scalar> foot = q - h * normal;
  const Vector3<Scalar> x = foot + grad * (std::abs(h) / std::sqrt(Scalar(1) - grad2));
  const Vector3<Scalar> rel = x - c1;
  const Scalar b1 = rel.dot(e1), b2 = rel.dot(e2);
  const Scalar u = (g11 * b1 - g01 * b2) / det;
  const Scalar v = (g00 * b2 - g01 * b1) / det;
  if (u < 0 || v < 0 || u + v > 1) return edges();
  return (q - x).norm() - (r1 + u * d1 + v * d2);
}

enum class PrimitiveKind { Sphere, Cone, Slab };

/// Sphere, cone or slab; degenerate cones and slabs are demoted on creation.
struct MedialPrimitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  std::array<Vec3, 3> centers;
  std::array<double, 3> radii{};

  static MedialPrimitive sphere(const Vec3& c, double r);
  /// Demoted to a sphere (the larger one) when the centers coincide.
  static MedialPrimitive cone(const Vec3& c1, double r1, const Vec3& c2, double r2);
  /// Collinear centers evaluate as the union of the three edge cones.
  static MedialPrimitive slab(const Vec3& c1, double r1, const Vec3& c2, double r2, const Vec3& c3, double r3);

  int ball_count() const { return kind == PrimitiveKind::Sphere ? 1 : (kind == PrimitiveKind::Cone ? 2 : 3); }
  double distance(const Vec3& q) const;
};

/// The union of a skeleton's primitives: spheres at vertices, cones on edges,
/// slabs on triangles.
class Envelope {
 public:
  explicit Envelope(const Skeleton& skeleton);

  const std::vector<MedialPrimitive>& primitives() const { return primitives_; }

  /// min over primitives of the primitive distance. Read-only, thread-safe.
  double distance(const Vec3& q) const;
  /// True when some primitive has distance < -tol at q; stops at the first.
  bool inside(const Vec3& q, double tol) const;

 private:
  std::vector<MedialPrimitive> primitives_;
  // Bounding balls: distance(q) >= |q - center| - reach for every point.
  std::vector<Vec3> bound_center_;
  std::vector<double> bound_reach_;
};

/// envelope_distance(q, skeleton); throws EmptySkeleton.
double envelope_distance(const Vec3& q, const Skeleton& skeleton);

/// m points on the union envelope: area-weighted draws on sphere surfaces,
/// cone frusta and slab tangent faces, rejecting points strictly inside the
/// union (distance < -1e-9).
Points sample_envelope(const Skeleton& skeleton, Eigen::Index m, std::uint64_t seed);

}  // namespace coverax
