#pragma once

#include "coverax/common.hpp"

namespace coverax::predicates {

/// Sign of det[b - a; c - a; d - a]. Positive when d lies on the side of
/// plane abc that (b - a) x (c - a) points to. Exact: a floating-point filter
/// with rational fallback.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Sign of the lifted determinant with rows (p - e, |p - e|^2 - (w_p - w_e))
/// for p in {a, b, c, d}. For orient3d(a, b, c, d) > 0 a negative result
/// means e has negative power with respect to the orthosphere of abcd
/// (e conflicts with the tetrahedron). Exact.
int power_test(const Vec3& a, double wa, const Vec3& b, double wb, const Vec3& c, double wc,
               const Vec3& d, double wd, const Vec3& e, double we);

/// Counts how often the exact fallback ran (diagnostics and tests).
std::uint64_t exact_fallback_count();

}  // namespace coverax::predicates
