#ifndef UAVMEC__SYSTEM_HPP_
#define UAVMEC__SYSTEM_HPP_

/**
 * @file
 * @brief Task execution, queue dynamics and UAV propulsion energy.
 */

#include <algorithm>
#include <cmath>
#include <vector>

#include "config.hpp"

namespace uavmec {

struct Execution
{
  double bits   = 0.0;
  double energy = 0.0;  ///< J
};

/// Local computing at frequency `f` (Hz) for `duration` seconds.
inline Execution local_execution(double f, double duration, double cycles_per_bit, double capacitance)
{
  return {f * duration / cycles_per_bit, capacitance * f * f * f * duration};
}

/// Uplink offloading for `duration` seconds at `rate` bits/s with transmit power `power`.
inline Execution offload_execution(double duration, double rate, double power)
{
  return {duration * rate, duration * power};
}

inline double update_task_queue(double backlog, double arrival, double served)
{
  return std::max(backlog + arrival - served, 0.0);
}

/// Virtual energy queue update in scaled units; `scale` maps Joules to queue units.
inline double update_virtual_queue(double backlog, double uav_energy, double budget, double scale)
{
  return std::max(backlog + scale * (uav_energy - budget), 0.0);
}

/// Rotary-wing propulsion power (W) at horizontal speed `v` (m/s).
inline double propulsion_power(double v, const PropulsionParams & p)
{
  const double v2 = v * v;
  const double blade = p.blade_profile * (1.0 + 3.0 * v2 / (p.tip_speed * p.tip_speed));
  // sqrt(C3 + v^4/4) - v^2/2 written without cancellation.
  const double radicand = p.hover_velocity4 / (std::sqrt(p.hover_velocity4 + 0.25 * v2 * v2) + 0.5 * v2);
  const double induced = p.induced * std::sqrt(radicand);
  return blade + induced + p.parasite * v2 * v;
}

inline double propulsion_energy(const Vec2 & from, const Vec2 & to, double slot_length, const PropulsionParams & p)
{
  return propulsion_power((to - from).norm() / slot_length, p) * slot_length;
}

struct QueueState
{
  std::vector<double> data;    ///< Q_k, bits
  double energy = 0.0;  ///< Q_u, scaled J
};

/// Per-slot control output and the quantities it induces.
struct SlotDecision
{
  std::vector<double> cpu_freq;      ///< f_k, Hz
  std::vector<double> offload_time;  ///< delta_k, s
  Vec2 next_position{0.0, 0.0};      ///< UAV position at the end of the slot, m
  std::vector<double> local_bits;
  std::vector<double> offload_bits;
  std::vector<double> local_energy;    ///< J
  std::vector<double> offload_energy;  ///< J
  double uav_energy = 0.0;             ///< J
  int sca_iterations = 0;

  double executed_bits(std::size_t k) const { return local_bits[k] + offload_bits[k]; }
  double user_energy(std::size_t k) const { return local_energy[k] + offload_energy[k]; }

  double weighted_energy(const std::vector<double> & weights) const
  {
    double e = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) e += weights[k] * user_energy(k);
    return e;
  }
};

}  // namespace uavmec

#endif  // UAVMEC__SYSTEM_HPP_
