#ifndef UAVMEC__SURROGATES_HPP_
#define UAVMEC__SURROGATES_HPP_

/**
 * @file
 * @brief Convex under-estimators used by the successive convex approximation.
 *
 * Each surrogate is tangent to the function it replaces at the local point
 * and lies below it everywhere, so a point feasible for the surrogate
 * constraint set is feasible for the original one.
 */

#include <cmath>
#include <numbers>
#include <vector>

#include "channel.hpp"
#include "lyapunov.hpp"

namespace uavmec {

/// Local point of one SCA iteration, indexed per user.
struct SurrogatePoint
{
  Vec2 position{0.0, 0.0};           ///< candidate next UAV position, m
  std::vector<double> offload_time;  ///< s
  std::vector<double> cpu_freq;      ///< Hz
  double speed_slack = 0.0;          ///< y at the local point, m/s
  std::vector<double> sqrt_bits;     ///< psi at the local point, sqrt(bits)
};

/**
 * @brief Curvature coefficient of the rate lower bound at distance^2 `d2_local`.
 *
 * The rate is convex in the squared horizontal distance, so its tangent in
 * that variable is a global under-estimator; this is the negated slope.
 */
inline double rate_slope(double snr, double d2_local, const ChannelParams & prm)
{
  const double iota = 0.5 * prm.pathloss_exponent;
  const double base = prm.altitude * prm.altitude + d2_local;
  const double base_pow = std::pow(base, iota);
  return prm.bandwidth * std::numbers::log2e * snr * iota / ((snr + base_pow) * base);
}

/// Concave quadratic lower bound of the uplink rate of user `u` at UAV position `p`.
inline double rate_surrogate(const UserSlot & u, const Vec2 & p, const Vec2 & p_local)
{
  const double d2_local = (p_local - u.position).squaredNorm();
  const double d2 = (p - u.position).squaredNorm();
  return rate_from_snr(u.snr, d2_local, u.channel) - rate_slope(u.snr, d2_local, u.channel) * (d2 - d2_local);
}

/// Induced-velocity slack at the local point: sqrt(sqrt(C3 + v^4/4) - v^2/2).
inline double y_local(const Vec2 & p_local, const Vec2 & p_u, double slot_length, double c3)
{
  const double v2 = (p_local - p_u).squaredNorm() / (slot_length * slot_length);
  return std::sqrt(c3 / (std::sqrt(c3 + 0.25 * v2 * v2) + 0.5 * v2));
}

/// First-order expansion of y^2 + ||p - p_u||^2 / Delta^2 at (p_local, y_l); affine in (p, y).
inline double y_surrogate(const Vec2 & p, double y, const Vec2 & p_local, double y_l, const Vec2 & p_u, double slot_length)
{
  const double inv_dt2 = 1.0 / (slot_length * slot_length);
  const Vec2 step = p_local - p_u;
  return y_l * y_l + 2.0 * y_l * (y - y_l) + step.squaredNorm() * inv_dt2 + 2.0 * inv_dt2 * step.dot(p - p_local);
}

inline double psi_local(double offload_time, double rate) { return std::sqrt(std::max(offload_time * rate, 0.0)); }

/// Tangent lower bound of psi^2 at psi_l.
inline double theta_surrogate(double psi, double psi_l) { return psi_l * psi_l + 2.0 * psi_l * (psi - psi_l); }

}  // namespace uavmec

#endif  // UAVMEC__SURROGATES_HPP_
