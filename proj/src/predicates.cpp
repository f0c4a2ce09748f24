#include "coverax/predicates.hpp"

#include <gmpxx.h>

#include <array>
#include <atomic>
#include <cmath>

namespace coverax::predicates {

namespace {

std::atomic<std::uint64_t> fallbacks{0};

template <typename T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

template <typename T>
T det3(const std::array<T, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

// Row-major 4x4 determinant by Laplace expansion along the last column.
template <typename T>
T det4(const std::array<T, 16>& m) {
  auto minor = [&](int skip) {
    std::array<T, 9> s;
    int k = 0;
    for (int r = 0; r < 4; ++r) {
      if (r == skip) continue;
      for (int c = 0; c < 3; ++c) s[k++] = m[r * 4 + c];
    }
    return det3(s);
  };
  T out = 0;
  for (int r = 0; r < 4; ++r) {
    const T term = m[r * 4 + 3] * minor(r);
    if ((r + 3) % 2 == 0) {
      out += term;
    } else {
      out -= term;
    }
  }
  return out;
}

double perm3(const std::array<double, 9>& m) {
  return std::abs(m[0]) * (std::abs(m[4] * m[8]) + std::abs(m[5] * m[7])) +
         std::abs(m[1]) * (std::abs(m[3] * m[8]) + std::abs(m[5] * m[6])) +
         std::abs(m[2]) * (std::abs(m[3] * m[7]) + std::abs(m[4] * m[6]));
}

double perm4(const std::array<double, 16>& m) {
  double out = 0.0;
  for (int r = 0; r < 4; ++r) {
    std::array<double, 9> s;
    int k = 0;
    for (int rr = 0; rr < 4; ++rr) {
      if (rr == r) continue;
      for (int c = 0; c < 3; ++c) s[k++] = m[rr * 4 + c];
    }
    out += std::abs(m[r * 4 + 3]) * perm3(s);
  }
  return out;
}

constexpr double kOrientBound = 1e-14;
constexpr double kPowerBound = 1e-12;

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 u = b - a, v = c - a, w = d - a;
  const std::array<double, 9> m{u.x(), u.y(), u.z(), v.x(), v.y(), v.z(), w.x(), w.y(), w.z()};
  const double det = det3(m);
  if (std::abs(det) > kOrientBound * perm3(m)) return sign_of(det);

  ++fallbacks;
  std::array<mpq_class, 9> q;
  const std::array<const Vec3*, 3> rows{&b, &c, &d};
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) q[r * 3 + k] = mpq_class((*rows[r])[k]) - mpq_class(a[k]);
  }
  return sign_of(det3(q));
}

int power_test(const Vec3& a, double wa, const Vec3& b, double wb, const Vec3& c, double wc,
               const Vec3& d, double wd, const Vec3& e, double we) {
  const std::array<const Vec3*, 4> p{&a, &b, &c, &d};
  const std::array<double, 4> w{wa, wb, wc, wd};

  std::array<double, 16> m, mag;
  for (int r = 0; r < 4; ++r) {
    const Vec3 diff = *p[r] - e;
    const double dw = w[r] - we;
    for (int k = 0; k < 3; ++k) m[r * 4 + k] = mag[r * 4 + k] = diff[k];
    m[r * 4 + 3] = diff.squaredNorm() - dw;
    mag[r * 4 + 3] = diff.squaredNorm() + std::abs(dw);
  }
  const double det = det4(m);
  if (std::abs(det) > kPowerBound * perm4(mag)) return sign_of(det);

  ++fallbacks;
  std::array<mpq_class, 16> q;
  for (int r = 0; r < 4; ++r) {
    mpq_class lift = -(mpq_class(w[r]) - mpq_class(we));
    for (int k = 0; k < 3; ++k) {
      q[r * 4 + k] = mpq_class((*p[r])[k]) - mpq_class(e[k]);
      lift += q[r * 4 + k] * q[r * 4 + k];
    }
    q[r * 4 + 3] = lift;
  }
  return sign_of(det4(q));
}

std::uint64_t exact_fallback_count() { return fallbacks.load(); }

}  // namespace coverax::predicates
