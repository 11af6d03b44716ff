#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "csg/common.hpp"
#include "csg/rng.hpp"

namespace csg {

inline bool is_simplex_point(const Vector& v, double tol = kTieTol) {
  if (v.size() < 1) return false;
  if (v.minCoeff() < -tol) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

// Euclidean projection onto the probability simplex (sorted-threshold method).
inline Vector project_to_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    css += u[j];
    const double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vector out(m);
  for (Eigen::Index j = 0; j < m; ++j) out[j] = std::max(v[j] - theta, 0.0);
  // Kill the last-ulp drift so downstream invariant checks at 1e-9 hold.
  out /= out.sum();
  return out;
}

// Flat-Dirichlet draw on the simplex (normalized exponentials).
inline Vector sample_simplex_uniform(RngStream& rng, int m) {
  Vector v(m);
  for (int j = 0; j < m; ++j) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v[j] = -std::log(u);
  }
  return v / v.sum();
}

// Uniform draw from {s : ||s||_2 = radius, <s, 1> = 0}: Gaussian draw,
// project onto the zero-sum hyperplane, renormalize.
inline Vector sample_sphere_in_hyperplane(RngStream& rng, int m, double radius) {
  while (true) {
    Vector g(m);
    for (int j = 0; j < m; ++j) g[j] = rng.normal();
    g.array() -= g.mean();
    const double n = g.norm();
    if (n > 1e-12) return g * (radius / n);
  }
}

// Uniform draw from the unit sphere S^{m-1} (ambient, no hyperplane
// constraint); for m = 1 this is +-1.
inline Vector sample_unit_sphere(RngStream& rng, int m) {
  while (true) {
    Vector g(m);
    for (int j = 0; j < m; ++j) g[j] = rng.normal();
    const double n = g.norm();
    if (n > 1e-12) return g / n;
  }
}

// l2 norm of v projected onto the simplex affine hull's direction space
// {x : <x, 1> = 0}.  Distances between simplex points live there.
inline double hull_norm(const Vector& v) {
  return (v.array() - v.mean()).matrix().norm();
}

}  // namespace csg
