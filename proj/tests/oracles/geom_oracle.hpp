#pragma once

// Sampling oracle for point-to-surface distance. Deliberately shares no code
// with the kernels: surfaces are covered with dense point samples and the
// distance is the nearest sample, with separate inside tests for solids.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tips/model.hpp"

namespace tips::oracle {

struct P {
  double x, y, z;
};

inline P to_p(const Vec3& v) { return {v.x, v.y, v.z}; }

inline double dist(P a, P b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// n points on the unit sphere (golden-angle spiral).
inline std::vector<P> fibonacci_sphere(std::size_t n) {
  std::vector<P> out;
  out.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * static_cast<double>(i);
    out.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return out;
}

class SurfaceSamples {
 public:
  std::vector<P> points;

  double nearest(P p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : points) best = std::min(best, dist(p, s));
    return best;
  }
};

inline SurfaceSamples sample_sphere(const Sphere& s, std::size_t n) {
  SurfaceSamples out;
  for (const auto& u : fibonacci_sphere(n)) {
    out.points.push_back({s.center.x + s.radius * u.x, s.center.y + s.radius * u.y,
                          s.center.z + s.radius * u.z});
  }
  return out;
}

// Cylinder wall on a (ring x segment) grid plus two hemispherical caps, with
// sample counts split in proportion to area.
inline SurfaceSamples sample_capsule(const Capsule& c, std::size_t n) {
  P a = to_p(c.a), b = to_p(c.b);
  P axis{b.x - a.x, b.y - a.y, b.z - a.z};
  double len = dist(a, b);
  P w{axis.x / len, axis.y / len, axis.z / len};
  // Orthonormal frame around the axis.
  P helper = std::abs(w.x) < 0.9 ? P{1, 0, 0} : P{0, 1, 0};
  P u{w.y * helper.z - w.z * helper.y, w.z * helper.x - w.x * helper.z,
      w.x * helper.y - w.y * helper.x};
  double ul = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  u = {u.x / ul, u.y / ul, u.z / ul};
  P v{w.y * u.z - w.z * u.y, w.z * u.x - w.x * u.z, w.x * u.y - w.y * u.x};

  double r = c.radius;
  double wallArea = 2 * std::numbers::pi * r * len;
  double capArea = 4 * std::numbers::pi * r * r;
  auto wallN = static_cast<std::size_t>(static_cast<double>(n) * wallArea / (wallArea + capArea));
  std::size_t capN = n - wallN;

  SurfaceSamples out;
  // Choose rings and segments so that spacing along and around the axis match.
  double circumference = 2 * std::numbers::pi * r;
  auto segments = static_cast<std::size_t>(
      std::max(8.0, std::sqrt(static_cast<double>(wallN) * circumference / len)));
  std::size_t rings = std::max<std::size_t>(2, wallN / segments);
  for (std::size_t i = 0; i < rings; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(rings - 1);
    P base{a.x + axis.x * t, a.y + axis.y * t, a.z + axis.z * t};
    for (std::size_t k = 0; k < segments; ++k) {
      double ang = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(segments);
      double cu = std::cos(ang) * r, sv = std::sin(ang) * r;
      out.points.push_back({base.x + u.x * cu + v.x * sv, base.y + u.y * cu + v.y * sv,
                            base.z + u.z * cu + v.z * sv});
    }
  }
  // Full sphere of cap samples split between the two ends by hemisphere.
  for (const auto& s : fibonacci_sphere(capN)) {
    double along = s.x * w.x + s.y * w.y + s.z * w.z;
    P end = along < 0 ? a : b;
    out.points.push_back({end.x + r * s.x, end.y + r * s.y, end.z + r * s.z});
  }
  return out;
}

// Barycentric grid with about n points.
inline void sample_triangle(P a, P b, P c, std::size_t n, std::vector<P>& out) {
  auto k = static_cast<std::size_t>(std::max(2.0, std::sqrt(2.0 * static_cast<double>(n))));
  for (std::size_t i = 0; i <= k; ++i) {
    for (std::size_t j = 0; i + j <= k; ++j) {
      double s = static_cast<double>(i) / static_cast<double>(k);
      double t = static_cast<double>(j) / static_cast<double>(k);
      double r = 1.0 - s - t;
      out.push_back({a.x * r + b.x * s + c.x * t, a.y * r + b.y * s + c.y * t,
                     a.z * r + b.z * s + c.z * t});
    }
  }
}

inline SurfaceSamples sample_mesh(const TriangleMesh& m, std::size_t n) {
  SurfaceSamples out;
  std::size_t per = std::max<std::size_t>(3, n / std::max<std::size_t>(1, m.triangles.size()));
  for (const auto& t : m.triangles) {
    sample_triangle(to_p(m.vertices[t[0]]), to_p(m.vertices[t[1]]), to_p(m.vertices[t[2]]), per,
                    out.points);
  }
  return out;
}

inline bool inside_sphere(P p, const Sphere& s) { return dist(p, to_p(s.center)) <= s.radius; }

inline bool inside_capsule(P p, const Capsule& c) {
  // Fine 1-D scan along the axis for the nearest axis point.
  P a = to_p(c.a), b = to_p(c.b);
  double best = std::numeric_limits<double>::infinity();
  const int steps = 20000;
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    best = std::min(best, dist(p, {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t,
                                   a.z + (b.z - a.z) * t}));
  }
  return best <= c.radius;
}

// Oracle distance for a primitive: 0 inside solids, else nearest sample.
inline double oracle_distance(const Vec3& point, const GeometryPrimitive& g, std::size_t n = 100000) {
  P p = to_p(point);
  if (const auto* s = std::get_if<Sphere>(&g)) {
    return inside_sphere(p, *s) ? 0.0 : sample_sphere(*s, n).nearest(p);
  }
  if (const auto* c = std::get_if<Capsule>(&g)) {
    return inside_capsule(p, *c) ? 0.0 : sample_capsule(*c, n).nearest(p);
  }
  return sample_mesh(std::get<TriangleMesh>(g), n).nearest(p);
}

}  // namespace tips::oracle
