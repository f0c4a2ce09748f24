#pragma once

#include "coverax/mesh.hpp"

namespace coverax::shapes {

// Closed, outward-oriented test meshes (two_ball_union is a soup).

/// Subdivided icosahedron projected to the sphere; 20 * 4^subdivisions faces.
TriangleMesh icosphere(int subdivisions, double radius = 1.0, const Vec3& center = Vec3::Zero());
TriangleMesh ellipsoid(const Vec3& semi_axes, int subdivisions = 3);
/// Closed cylinder along +x from 0 to length.
TriangleMesh tube(double radius, double length, int segments = 32, int rings = 16);
TriangleMesh torus(double major, double minor, int major_segments = 40, int minor_segments = 16);
TriangleMesh box(const Vec3& lo, const Vec3& hi);
/// L-shaped prism: outer legs of length `leg`, width `width`, thickness `depth`.
TriangleMesh l_bracket(double leg = 2.0, double width = 0.5, double depth = 0.5);
/// Two overlapping spheres with the triangles inside the other ball removed;
/// not watertight along the seam.
TriangleMesh two_ball_union(double radius = 1.0, double separation = 1.4, int subdivisions = 3);
/// Unit cube [0,1]^3, 8 vertices and 12 triangles.
TriangleMesh unit_cube();

}  // namespace coverax::shapes
