#include "coverax/envelope.hpp"

#include <numbers>

namespace coverax {

MedialPrimitive MedialPrimitive::sphere(const Vec3& c, double r) {
  MedialPrimitive p;
  p.kind = PrimitiveKind::Sphere;
  p.centers = {c, c, c};
  p.radii = {r, r, r};
  return p;
}

MedialPrimitive MedialPrimitive::cone(const Vec3& c1, double r1, const Vec3& c2, double r2) {
  if ((c1.array() == c2.array()).all()) return sphere(c1, std::max(r1, r2));
  MedialPrimitive p;
  p.kind = PrimitiveKind::Cone;
  p.centers = {c1, c2, c2};
  p.radii = {r1, r2, r2};
  return p;
}

MedialPrimitive MedialPrimitive::slab(const Vec3& c1, double r1, const Vec3& c2, double r2, const Vec3& c3,
                                      double r3) {
  MedialPrimitive p;
  p.kind = PrimitiveKind::Slab;
  p.centers = {c1, c2, c3};
  p.radii = {r1, r2, r3};
  return p;
}

double MedialPrimitive::distance(const Vec3& q) const {
  switch (kind) {
    case PrimitiveKind::Sphere: return sphere_distance(q, centers[0], radii[0]);
    case PrimitiveKind::Cone: return cone_distance(q, centers[0], radii[0], centers[1], radii[1]);
    case PrimitiveKind::Slab:
      return slab_distance(q, centers[0], radii[0], centers[1], radii[1], centers[2], radii[2]);
  }
  return std::numeric_limits<double>::infinity();
}

Envelope::Envelope(const Skeleton& sk) {
  if (sk.empty()) throw Error(ErrorCode::EmptySkeleton, "skeleton has no vertices");
  for (Eigen::Index i = 0; i < sk.vertex_count(); ++i) {
    primitives_.push_back(MedialPrimitive::sphere(sk.centers.col(i), sk.radii(i)));
  }
  for (const auto& e : sk.edges) {
    primitives_.push_back(
        MedialPrimitive::cone(sk.centers.col(e[0]), sk.radii(e[0]), sk.centers.col(e[1]), sk.radii(e[1])));
  }
  for (const auto& t : sk.triangles) {
    primitives_.push_back(MedialPrimitive::slab(sk.centers.col(t[0]), sk.radii(t[0]), sk.centers.col(t[1]),
                                                sk.radii(t[1]), sk.centers.col(t[2]), sk.radii(t[2])));
  }
  for (const auto& p : primitives_) {
    const int n = p.ball_count();
    Vec3 c = Vec3::Zero();
    for (int k = 0; k < n; ++k) c += p.centers[static_cast<std::size_t>(k)];
    c /= n;
    double reach = 0.0;
    for (int k = 0; k < n; ++k) {
      reach = std::max(reach, (p.centers[static_cast<std::size_t>(k)] - c).norm() + p.radii[static_cast<std::size_t>(k)]);
    }
    bound_center_.push_back(c);
    bound_reach_.push_back(reach * (1.0 + 1e-12) + 1e-15);
  }
}

double Envelope::distance(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < primitives_.size(); ++k) {
    if ((q - bound_center_[k]).norm() - bound_reach_[k] >= best) continue;
    best = std::min(best, primitives_[k].distance(q));
  }
  return best;
}

bool Envelope::inside(const Vec3& q, double tol) const {
  for (std::size_t k = 0; k < primitives_.size(); ++k) {
    if ((q - bound_center_[k]).norm() - bound_reach_[k] >= -tol) continue;
    if (primitives_[k].distance(q) < -tol) return true;
  }
  return false;
}

double envelope_distance(const Vec3& q, const Skeleton& skeleton) { return Envelope(skeleton).distance(q); }

namespace {

// A sampleable piece of a primitive's boundary surface.
struct SurfacePiece {
  enum class Kind { Sphere, Frustum, Face } kind;
  Vec3 a, b, c;          // sphere: center in a; frustum: end centers; face: triangle corners
  double r1 = 0, r2 = 0;  // sphere radius / frustum end radii
  double area = 0;
};

void orthonormal_frame(const Vec3& u, Vec3& w1, Vec3& w2) {
  const Vec3 helper = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  w1 = u.cross(helper).normalized();
  w2 = u.cross(w1);
}

std::vector<SurfacePiece> surface_pieces(const Skeleton& sk) {
  std::vector<SurfacePiece> pieces;
  for (Eigen::Index i = 0; i < sk.vertex_count(); ++i) {
    const double r = sk.radii(i);
    if (r > 0) pieces.push_back({SurfacePiece::Kind::Sphere, sk.centers.col(i), {}, {}, r, r, 4.0 * std::numbers::pi * r * r});
  }
  for (const auto& e : sk.edges) {
    const Vec3 c1 = sk.centers.col(e[0]), c2 = sk.centers.col(e[1]);
    const double r1 = sk.radii(e[0]), r2 = sk.radii(e[1]);
    const double length = (c2 - c1).norm();
    if (length <= std::abs(r2 - r1)) continue;
    const double k = (r2 - r1) / length;
    const double s = std::sqrt(1.0 - k * k);
    const double slant = std::sqrt(length * length - (r2 - r1) * (r2 - r1));
    const double area = std::numbers::pi * (r1 + r2) * s * slant;
    if (area > 0) pieces.push_back({SurfacePiece::Kind::Frustum, c1, c2, {}, r1, r2, area});
  }
  for (const auto& t : sk.triangles) {
    const Vec3 c1 = sk.centers.col(t[0]), c2 = sk.centers.col(t[1]), c3 = sk.centers.col(t[2]);
    const double r1 = sk.radii(t[0]), r2 = sk.radii(t[1]), r3 = sk.radii(t[2]);
    const Vec3 e1 = c2 - c1, e2 = c3 - c1;
    const double g00 = e1.dot(e1), g01 = e1.dot(e2), g11 = e2.dot(e2);
    const double det = g00 * g11 - g01 * g01;
    if (!(det > 1e-14 * g00 * g11)) continue;
    const double d1 = r2 - r1, d2 = r3 - r1;
    const double alpha = (g11 * d1 - g01 * d2) / det, beta = (g00 * d2 - g01 * d1) / det;
    const double grad2 = alpha * d1 + beta * d2;
    if (grad2 >= 1.0) continue;
    const Vec3 grad = alpha * e1 + beta * e2;
    const Vec3 normal = e1.cross(e2).normalized();
    // Tangent planes n.x + r = const with unit n = -grad +- sqrt(1 - |grad|^2) normal.
    for (double side : {1.0, -1.0}) {
      const Vec3 n = -grad + side * std::sqrt(1.0 - grad2) * normal;
      const Vec3 a = c1 + r1 * n, b = c2 + r2 * n, c = c3 + r3 * n;
      const double area = 0.5 * (b - a).cross(c - a).norm();
      if (area > 0) pieces.push_back({SurfacePiece::Kind::Face, a, b, c, 0, 0, area});
    }
  }
  return pieces;
}

Vec3 draw(const SurfacePiece& piece, Rng& rng) {
  switch (piece.kind) {
    case SurfacePiece::Kind::Sphere: {
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      return piece.a + piece.r1 * Vec3(s * std::cos(phi), s * std::sin(phi), z);
    }
    case SurfacePiece::Kind::Frustum: {
      const Vec3 d = piece.b - piece.a;
      const double length = d.norm();
      const Vec3 u = d / length;
      const double dr = piece.r2 - piece.r1;
      const double k = dr / length;
      const double s = std::sqrt(1.0 - k * k);
      Vec3 w1, w2;
      orthonormal_frame(u, w1, w2);
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double uu = rng.uniform();
      // Ring radius grows linearly along the slant; invert the linear density.
      const double rho1 = piece.r1 * s, rho2 = piece.r2 * s;
      double tau = uu;
      if (std::abs(rho2 - rho1) > 1e-12 * (rho1 + rho2)) {
        tau = (-rho1 + std::sqrt(rho1 * rho1 + (rho2 - rho1) * (rho1 + rho2) * uu)) / (rho2 - rho1);
      }
      const Vec3 n = -k * u + s * (std::cos(phi) * w1 + std::sin(phi) * w2);
      return piece.a + tau * d + (piece.r1 + tau * dr) * n;
    }
    case SurfacePiece::Kind::Face: {
      double r1 = rng.uniform(), r2 = rng.uniform();
      if (r1 + r2 > 1.0) {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
      }
      return piece.a + r1 * (piece.b - piece.a) + r2 * (piece.c - piece.a);
    }
  }
  return piece.a;
}

}  // namespace

Points sample_envelope(const Skeleton& skeleton, Eigen::Index m, std::uint64_t seed) {
  if (skeleton.empty()) throw Error(ErrorCode::EmptySkeleton, "skeleton has no vertices");
  if (m < 1) throw Error(ErrorCode::UsageError, "envelope sample count must be >= 1");
  const Envelope envelope(skeleton);
  const auto pieces = surface_pieces(skeleton);
  std::vector<double> cdf;
  double total = 0.0;
  for (const auto& p : pieces) cdf.push_back(total += p.area);
  if (!(total > 0.0)) throw Error(ErrorCode::RejectionStarvation, "envelope has zero area");

  Points out(3, m);
  Eigen::Index accepted = 0;
  const std::uint64_t max_trials = 200 * static_cast<std::uint64_t>(m) + 100'000;
  std::uint64_t trials = 0;
  Rng rng(seed);
  const std::size_t batch = 4096;
  std::vector<Vec3> trial(batch);
  std::vector<char> keep(batch);
  while (accepted < m) {
    if (trials >= max_trials) {
      throw Error(ErrorCode::RejectionStarvation,
                  "only " + std::to_string(accepted) + " envelope points accepted in " + std::to_string(trials) +
                      " trials");
    }
    for (auto& t : trial) {
      const double u = rng.uniform() * total;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), pieces.size() - 1);
      t = draw(pieces[k], rng);
    }
    parallel_for(0, batch, [&](std::size_t b) { keep[b] = !envelope.inside(trial[b], 1e-9); });
    for (std::size_t b = 0; b < batch && accepted < m; ++b) {
      ++trials;
      if (keep[b]) out.col(accepted++) = trial[b];
    }
  }
  return out;
}

}  // namespace coverax
