#ifndef UAVMEC__CHANNEL_HPP_
#define UAVMEC__CHANNEL_HPP_

/**
 * @file
 * @brief Probabilistic line-of-sight air-to-ground channel.
 */

#include <cmath>
#include <numbers>

#include "config.hpp"

namespace uavmec {

struct ChannelParams
{
  double los_a             = 9.61;
  double los_b             = 0.16;
  double reference_gain    = 1e-5;
  double nlos_attenuation  = 0.2;
  double pathloss_exponent = 2.2;
  double altitude          = 100.0;
  double bandwidth         = 1e6;
  double noise_power       = 1e-12;
  double transmit_power    = 0.1;
};

inline ChannelParams channel_params(const ScenarioConfig & c, int user)
{
  return {c.los_a,
          c.los_b,
          c.reference_gain,
          c.nlos_attenuation,
          c.pathloss_exponent,
          c.altitude,
          c.bandwidth,
          c.noise_power,
          c.transmit_power[static_cast<std::size_t>(user)]};
}

/// Elevation angle in degrees; 90 when the UAV is directly overhead.
inline double elevation_angle(const Vec2 & p_u, const Vec2 & p_k, double h)
{
  const double d = (p_u - p_k).norm();
  if (d == 0.0) return 90.0;
  return 180.0 / std::numbers::pi * std::atan(h / d);
}

inline double los_probability(double theta_deg, double a, double b)
{
  return 1.0 / (1.0 + a * std::exp(-b * (theta_deg - a)));
}

/// LoS probability blended with the attenuated NLoS share, in [kappa, 1].
inline double regularized_los(double theta_deg, const ChannelParams & prm)
{
  const double p = los_probability(theta_deg, prm.los_a, prm.los_b);
  return p + (1.0 - p) * prm.nlos_attenuation;
}

inline double expected_gain(const Vec2 & p_u, const Vec2 & p_k, const ChannelParams & prm)
{
  const double phat = regularized_los(elevation_angle(p_u, p_k, prm.altitude), prm);
  const double d2 = prm.altitude * prm.altitude + (p_u - p_k).squaredNorm();
  return phat * prm.reference_gain / std::pow(d2, 0.5 * prm.pathloss_exponent);
}

/// gamma_k = P_k * Phat * g0 / N0 for the geometry (p_u, p_k).
inline double snr_coefficient(const Vec2 & p_u, const Vec2 & p_k, const ChannelParams & prm)
{
  const double phat = regularized_los(elevation_angle(p_u, p_k, prm.altitude), prm);
  return prm.transmit_power * phat * prm.reference_gain / prm.noise_power;
}

/// W log2(1 + gamma / (h^2 + d2)^iota), iota = iota_tilde / 2.
inline double rate_from_snr(double gamma, double horizontal_dist2, const ChannelParams & prm)
{
  const double denom = std::pow(prm.altitude * prm.altitude + horizontal_dist2, 0.5 * prm.pathloss_exponent);
  return prm.bandwidth * std::log2(1.0 + gamma / denom);
}

inline double uplink_rate(const Vec2 & p_u, const Vec2 & p_k, const ChannelParams & prm)
{
  return rate_from_snr(snr_coefficient(p_u, p_k, prm), (p_u - p_k).squaredNorm(), prm);
}

/// Overhead rate with Phat = 1; the largest rate any geometry can deliver.
inline double peak_rate(const ChannelParams & prm)
{
  const double gamma = prm.transmit_power * prm.reference_gain / prm.noise_power;
  return rate_from_snr(gamma, 0.0, prm);
}

}  // namespace uavmec

#endif  // UAVMEC__CHANNEL_HPP_
