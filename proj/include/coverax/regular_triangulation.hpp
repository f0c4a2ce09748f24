#pragma once

#include "coverax/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace coverax {

enum class PointTag { Inner, Surface };

/// A generator of the power diagram. Weight is in squared-length units.
struct WeightedPoint {
  Vec3 position = Vec3::Zero();
  double weight = 0.0;
  PointTag tag = PointTag::Surface;
  Eigen::Index source_index = 0;
};

using Tetrahedron = std::array<Eigen::Index, 4>;

struct RegularTriangulation {
  /// Finite tetrahedra, vertex indices ascending within each, list sorted.
  std::vector<Tetrahedron> tetrahedra;
  /// Points with an empty power cell.
  std::vector<Eigen::Index> redundant;

  /// Coordinates actually triangulated (input, or input plus perturbation).
  Points positions;
  Eigen::VectorXd weights;
  bool perturbed = false;
  std::uint64_t perturbation_seed = 0;
  double perturbation_magnitude = 0.0;
};

/// Regular triangulation (dual of the power diagram): every output
/// tetrahedron's orthosphere has positive power distance to all other
/// weighted points. Predicates are exact; when one evaluates to exactly zero
/// the input is perturbed by a seeded offset of 1e-9 times the bbox
/// diagonal and the construction restarts. Throws DegenerateInput for fewer
/// than four points or an exactly coplanar input.
RegularTriangulation regular_triangulation(std::span<const WeightedPoint> points,
                                           std::uint64_t perturbation_seed = 0);

}  // namespace coverax
