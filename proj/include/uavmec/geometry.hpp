#ifndef UAVMEC__GEOMETRY_HPP_
#define UAVMEC__GEOMETRY_HPP_

/**
 * @file
 * @brief Planar helpers for the per-slot kinematic set.
 *
 * The UAV's next position must lie in the intersection ("lens") of the
 * one-step disk around its current position and the disk around the
 * destination that keeps the destination reachable.
 */

#include <algorithm>
#include <cmath>

#include "config.hpp"

namespace uavmec {

struct Disk
{
  Vec2 center{0.0, 0.0};
  double radius = 0.0;

  bool contains(const Vec2 & p, double tol = 0.0) const { return (p - center).norm() <= radius + tol; }

  Vec2 project(const Vec2 & p) const
  {
    const Vec2 d = p - center;
    const double n = d.norm();
    if (n <= radius) return p;
    return center + d * (radius / n);
  }
};

struct Lens
{
  Disk step;   ///< reachable in one slot
  Disk reach;  ///< keeps the destination reachable

  /// Unit vector from the step center toward the reach center, (1,0) when they coincide.
  Vec2 axis() const
  {
    const Vec2 d = reach.center - step.center;
    const double n = d.norm();
    return n > 0.0 ? Vec2(d / n) : Vec2(1.0, 0.0);
  }

  /// Interval [lo, hi] of the axis, measured from the step center, covered by the lens.
  std::pair<double, double> axis_interval() const
  {
    const double d = (reach.center - step.center).norm();
    return {std::max(-step.radius, d - reach.radius), std::min(step.radius, d + reach.radius)};
  }

  double width() const
  {
    const auto [lo, hi] = axis_interval();
    return hi - lo;
  }

  bool degenerate(double min_width = 1e-3) const { return width() < min_width; }

  /// Midpoint of the lens along the axis; strictly interior when the lens is not degenerate.
  Vec2 center() const
  {
    const auto [lo, hi] = axis_interval();
    return step.center + axis() * (0.5 * (lo + hi));
  }

  bool contains(const Vec2 & p, double tol = 0.0) const { return step.contains(p, tol) && reach.contains(p, tol); }

  /// Euclidean projection onto the lens.
  Vec2 project(const Vec2 & p) const
  {
    if (contains(p)) return p;
    if (const Vec2 a = reach.project(p); step.contains(a, 1e-9)) return a;
    if (const Vec2 b = step.project(p); reach.contains(b, 1e-9)) return b;
    // Closest point is a corner of the lens.
    const Vec2 e = axis();
    const double d = (reach.center - step.center).norm();
    const double r1 = step.radius;
    const double r2 = reach.radius;
    if (d <= 0.0 || d >= r1 + r2 || d <= std::abs(r1 - r2)) return center();
    const double t = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double s = std::sqrt(std::max(r1 * r1 - t * t, 0.0));
    const Vec2 normal(-e.y(), e.x());
    const Vec2 c1 = step.center + e * t + normal * s;
    const Vec2 c2 = step.center + e * t - normal * s;
    return (c1 - p).squaredNorm() <= (c2 - p).squaredNorm() ? c1 : c2;
  }
};

}  // namespace uavmec

#endif  // UAVMEC__GEOMETRY_HPP_
