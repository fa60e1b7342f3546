#ifndef UAVMEC__MOBILITY_HPP_
#define UAVMEC__MOBILITY_HPP_

/**
 * @file
 * @brief Gauss-Markov user mobility.
 */

#include <cmath>
#include <random>

#include "config.hpp"
#include "rng.hpp"

namespace uavmec {

struct UserKinematics
{
  Vec2 position;  ///< m
  Vec2 velocity;  ///< m/s
};

/**
 * @brief One Gauss-Markov velocity update.
 *
 * `noise` is a standard-normal 2-D sample; `sigma_bar` is the asymptotic
 * per-component standard deviation, so the stationary process has mean
 * `v_bar` and std `sigma_bar`.
 */
inline Vec2 step_velocity(const Vec2 & v, double alpha, const Vec2 & v_bar, double sigma_bar, const Vec2 & noise)
{
  return alpha * v + (1.0 - alpha) * v_bar + sigma_bar * std::sqrt(1.0 - alpha * alpha) * noise;
}

inline Vec2 step_position(const Vec2 & p, const Vec2 & v, double delta) { return p + v * delta; }

inline Vec2 standard_normal2(Rng & rng)
{
  std::normal_distribution<double> n01(0.0, 1.0);
  const double x = n01(rng);
  const double y = n01(rng);
  return {x, y};
}

/// Advances one user by a slot: position with the current velocity, then velocity.
inline UserKinematics advance(const UserKinematics & u, const ScenarioConfig & c, Rng & rng)
{
  return {step_position(u.position, u.velocity, c.slot_length),
          step_velocity(u.velocity, c.mobility_memory, c.mean_velocity, c.velocity_std, standard_normal2(rng))};
}

}  // namespace uavmec

#endif  // UAVMEC__MOBILITY_HPP_
