#include "tips/geom.hpp"

#include <algorithm>
#include <limits>

namespace tips::geom {

namespace {

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * s;
}

// Closest point on triangle abc to p, by Voronoi region of the triangle
// (vertex, edge or face region).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 ab = b - a;
  Vec3 ac = c - a;
  Vec3 ap = p - a;
  double d1 = dot(ab, ap);
  double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = dot(ab, bp);
  double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double v = d1 / (d1 - d3);
    return a + ab * v;
  }

  Vec3 cp = p - c;
  double d5 = dot(ab, cp);
  double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double w = d2 / (d2 - d6);
    return a + ac * w;
  }

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }

  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom;
  double w = vc * denom;
  return a + ab * v + ac * w;
}

}  // namespace

double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  return norm(p - closest_on_segment(p, a, b));
}

double dist_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  double area2 = norm(cross(b - a, c - a));
  double scale = std::max({norm(b - a), norm(c - a), norm(c - b)});
  if (area2 <= 1e-12 * scale * scale) {
    // Collinear or coincident vertices: the triangle is a segment or a point.
    return std::min({dist_point_segment(p, a, b), dist_point_segment(p, b, c),
                     dist_point_segment(p, a, c)});
  }
  return norm(p - closest_on_triangle(p, a, b, c));
}

double dist_point_sphere(const Vec3& p, const Vec3& center, double radius) {
  return std::max(0.0, norm(p - center) - radius);
}

double dist_point_capsule(const Vec3& p, const Vec3& a, const Vec3& b, double radius) {
  return std::max(0.0, dist_point_segment(p, a, b) - radius);
}

double dist_point_mesh(const Vec3& p, const TriangleMesh& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& tri : mesh.triangles) {
    best = std::min(best, dist_point_triangle(p, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                              mesh.vertices[tri[2]]));
  }
  return best;
}

double dist_point_primitive(const Vec3& p, const GeometryPrimitive& g) {
  struct Visitor {
    const Vec3& p;
    double operator()(const Sphere& s) const { return dist_point_sphere(p, s.center, s.radius); }
    double operator()(const Capsule& c) const { return dist_point_capsule(p, c.a, c.b, c.radius); }
    double operator()(const TriangleMesh& m) const { return dist_point_mesh(p, m); }
  };
  return std::visit(Visitor{p}, g);
}

double dist_point_simlet(const Vec3& p, const Simlet& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : s.geometry) best = std::min(best, dist_point_primitive(p, g));
  return best;
}

Vec3 vessel_point(const Simlet& s, double parameter) {
  for (const auto& g : s.geometry) {
    if (const auto* c = std::get_if<Capsule>(&g)) {
      const Vec3& proximal = s.proximalEnd == VesselEnd::A ? c->a : c->b;
      const Vec3& distal = s.proximalEnd == VesselEnd::A ? c->b : c->a;
      return lerp(proximal, distal, parameter);
    }
  }
  if (s.geometry.empty()) return {};
  struct Centre {
    Vec3 operator()(const Sphere& sp) const { return sp.center; }
    Vec3 operator()(const Capsule& c) const { return lerp(c.a, c.b, 0.5); }
    Vec3 operator()(const TriangleMesh& m) const {
      Vec3 sum;
      for (const auto& v : m.vertices) sum = sum + v;
      return m.vertices.empty() ? sum : sum * (1.0 / static_cast<double>(m.vertices.size()));
    }
  };
  return std::visit(Centre{}, s.geometry.front());
}

}  // namespace tips::geom
