#pragma once

#include "tips/model.hpp"

namespace tips::geom {

// All kernels return the surface distance in mm, clamped to 0 inside solids.

double dist_point_segment(const Vec3& p, const Vec3& a, const Vec3& b);
double dist_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double dist_point_sphere(const Vec3& p, const Vec3& center, double radius);
double dist_point_capsule(const Vec3& p, const Vec3& a, const Vec3& b, double radius);
// Brute force over triangles; the mesh is treated as a surface, not a solid.
double dist_point_mesh(const Vec3& p, const TriangleMesh& mesh);

double dist_point_primitive(const Vec3& p, const GeometryPrimitive& g);
double dist_point_simlet(const Vec3& p, const Simlet& s);

// Point on a capsule-like simlet's axis at vessel parameter s (0 = proximal end).
// Uses the first capsule primitive; falls back to the first primitive's centre.
Vec3 vessel_point(const Simlet& s, double parameter);

}  // namespace tips::geom
