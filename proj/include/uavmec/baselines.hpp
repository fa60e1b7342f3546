#ifndef UAVMEC__BASELINES_HPP_
#define UAVMEC__BASELINES_HPP_

/**
 * @file
 * @brief Benchmark policies: geometric-center tracking with optimal (GO) or
 * equal-time (GE) resource allocation.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyapunov.hpp"
#include "solver.hpp"

namespace uavmec {

enum class PolicyId { Joint, Go, Ge };

inline const char * to_string(PolicyId p)
{
  switch (p) {
  case PolicyId::Joint: return "joint";
  case PolicyId::Go: return "go";
  case PolicyId::Ge: return "ge";
  }
  return "unknown";
}

inline PolicyId parse_policy(const std::string & name)
{
  if (name == "joint") return PolicyId::Joint;
  if (name == "go") return PolicyId::Go;
  if (name == "ge") return PolicyId::Ge;
  throw std::invalid_argument("unknown policy '" + name + "' (expected joint, go or ge)");
}

inline Vec2 geometric_center(const std::vector<Vec2> & positions)
{
  if (positions.empty()) throw std::invalid_argument("geometric_center of an empty set");
  Vec2 sum(0.0, 0.0);
  for (const auto & p : positions) sum += p;
  return sum / static_cast<double>(positions.size());
}

/// Moves toward the users' center at up to full speed, kept inside the kinematic set.
inline Vec2 pursuit_position(const PerSlotProblem & pb)
{
  std::vector<Vec2> where;
  where.reserve(pb.num_users());
  for (const auto & u : pb.users) where.push_back(u.position);
  const Vec2 target = where.empty() ? pb.uav_position : geometric_center(where);
  const Vec2 d = target - pb.uav_position;
  const double n = d.norm();
  const double r = pb.step_radius();
  const Vec2 want = n <= r ? target : Vec2(pb.uav_position + d * (r / n));
  return kinematic_lens(pb).project(want);
}

inline SlotDecision go_step(const PerSlotProblem & pb)
{
  SlotDecision d = solve_fixed_position(pb, pursuit_position(pb));
  d.sca_iterations = 0;
  return d;
}

/**
 * @brief Equal offloading time for users with a non-empty queue.
 *
 * Each such user offloads over its whole share when a transmitted bit is
 * worth more than its energy, then computes locally at the stationary
 * frequency of its own term, within f_max and the remaining demand.
 */
inline SlotDecision ge_step(const PerSlotProblem & pb)
{
  const Vec2 p = pursuit_position(pb);
  const auto K = pb.num_users();
  const double dt = pb.slot_length;
  std::size_t active = 0;
  for (const auto & u : pb.users) active += u.demand > 0.0 ? 1 : 0;
  std::vector<double> f(K, 0.0), delta(K, 0.0);
  for (std::size_t k = 0; k < K && active > 0; ++k) {
    const auto & u = pb.users[k];
    if (u.demand <= 0.0) continue;
    const double share = dt / static_cast<double>(active);
    const double rate = pb.rate(k, p);
    const double vw = pb.tradeoff * u.weight;
    const double value = pb.bit_value(k);
    double offloaded = 0.0;
    if (value * rate > vw * u.transmit_power) {
      offloaded = std::min(share * rate, u.demand);
      delta[k] = rate > 0.0 ? offloaded / rate : 0.0;
    }
    const double denom = 3.0 * vw * pb.capacitance * u.cycles_per_bit;
    const double f_star = denom > 0.0 ? std::sqrt(value / denom) : u.max_freq;
    const double f_quota = std::max(u.demand - offloaded, 0.0) * u.cycles_per_bit / dt;
    f[k] = std::min({f_star, u.max_freq, f_quota});
  }
  SlotDecision d = finalize_decision(pb, f, delta, p);
  d.sca_iterations = 0;
  return d;
}

}  // namespace uavmec

#endif  // UAVMEC__BASELINES_HPP_
