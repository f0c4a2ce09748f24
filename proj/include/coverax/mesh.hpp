#pragma once

#include "coverax/common.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace coverax {

struct BoundingBox {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (max.array() < min.array()).any(); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return empty() ? 0.0 : extent().norm(); }

  static BoundingBox of(const Points& points);
};

/// Indexed triangle set. Soups are fine: no manifoldness or welding.
struct TriangleMesh {
  Points vertices;
  Eigen::Matrix3Xi triangles;
  /// Triangles removed at load time for having area <= kDegenerateArea.
  std::size_t dropped_degenerate = 0;

  static constexpr double kDegenerateArea = 1e-12;

  Eigen::Index vertex_count() const { return vertices.cols(); }
  Eigen::Index triangle_count() const { return triangles.cols(); }

  Vec3 corner(Eigen::Index t, int k) const { return vertices.col(triangles(k, t)); }
  double area(Eigen::Index t) const;
  BoundingBox bbox() const { return BoundingBox::of(vertices); }
  double diagonal() const { return bbox().diagonal(); }

  /// Drops degenerate and out-of-range triangles and records the count.
  void drop_degenerate();
};

struct OrientedPointCloud {
  Points points;
  std::optional<Points> normals;
  std::optional<Eigen::VectorXd> areas;

  static constexpr Eigen::Index kMinPoints = 4;

  Eigen::Index size() const { return points.cols(); }
  BoundingBox bbox() const { return BoundingBox::of(points); }
  double diagonal() const { return bbox().diagonal(); }
};

enum class FileFormat { Obj, Off, Ply, Xyz };

/// Parses "obj", "off", "ply", "xyz" (case-insensitive).
FileFormat parse_format(std::string_view name);
/// Infers the format from a file extension.
FileFormat format_from_path(const std::filesystem::path& path);
bool is_mesh_format(FileFormat format);

TriangleMesh load_mesh(const std::filesystem::path& path, FileFormat format);
OrientedPointCloud load_point_cloud(const std::filesystem::path& path, FileFormat format);
/// True when a PLY file has a nonempty face element.
bool ply_has_faces(const std::filesystem::path& path);

/// Whitespace-separated numeric table, one row per line ('#' lines skipped).
Eigen::MatrixXd read_columns(const std::filesystem::path& path);

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
/// Writes `x y z [extra columns...]` lines, full round-trip precision.
void write_xyz(const std::filesystem::path& path, const Points& points,
               const Eigen::MatrixXd* extra_columns = nullptr);

/// Uniform scale + translation: x' = scale * (x - origin).
struct NormalizeTransform {
  Vec3 origin = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (p - origin); }
  Vec3 invert(const Vec3& p) const { return p / scale + origin; }
  Points apply(const Points& p) const { return (scale * (p.colwise() - origin)).eval(); }
  Points invert(const Points& p) const { return ((p / scale).colwise() + origin).eval(); }
  double apply_length(double l) const { return scale * l; }
  double invert_length(double l) const { return l / scale; }
  bool is_identity() const { return scale == 1.0 && origin.isZero(0.0); }
};

/// Maps the bounding box into [0,1]^3 with its longest axis spanning [0,1].
NormalizeTransform normalizing_transform(const BoundingBox& box);
TriangleMesh normalize_shape(const TriangleMesh& mesh, NormalizeTransform& transform);
OrientedPointCloud normalize_shape(const OrientedPointCloud& cloud, NormalizeTransform& transform);

}  // namespace coverax
