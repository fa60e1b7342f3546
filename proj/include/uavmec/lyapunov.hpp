#ifndef UAVMEC__LYAPUNOV_HPP_
#define UAVMEC__LYAPUNOV_HPP_

/**
 * @file
 * @brief Drift-plus-penalty per-slot problem and slot-wise bound verification.
 *
 * The per-slot objective is
 * \f[
 *   \tilde Q_u s_u E_{UAV} + V \sum_k w_k E_k - \sum_k (s_q q_k)(s_q l_k),
 * \f]
 * with \f$q_k = Q_k + A_k\f$ and \f$\tilde Q_u\f$ the scaled virtual energy
 * queue, minimized over CPU frequencies, TDMA offloading times and the next
 * UAV position subject to the per-slot resource and kinematic constraints.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "system.hpp"
#include "trace.hpp"

namespace uavmec {

/// Per-user data of a per-slot problem. `snr` is frozen at the slot-start geometry.
struct UserSlot
{
  double demand = 0.0;    ///< q_k = Q_k + A_k, bits
  double arrival = 0.0;   ///< A_k, bits
  double backlog = 0.0;   ///< Q_k, bits
  Vec2 position{0.0, 0.0};
  double snr = 0.0;       ///< gamma_k
  double weight = 1.0;
  double transmit_power = 0.1;
  double cycles_per_bit = 1000.0;
  double max_freq = 1e9;
  ChannelParams channel;
};

struct PerSlotProblem
{
  int slot      = 1;  ///< n, 1-based
  int num_slots = 1;  ///< N
  std::vector<UserSlot> users;
  double energy_backlog = 0.0;  ///< scaled Q_u
  double tradeoff       = 50.0;
  double data_scale     = 1e-6;
  double energy_scale   = 0.1;
  double energy_budget  = 170.0;
  double capacitance    = 1e-28;
  Vec2 uav_position{0.0, 0.0};
  Vec2 destination{0.0, 0.0};
  double max_speed   = 25.0;
  double slot_length = 1.0;
  PropulsionParams propulsion;

  std::size_t num_users() const { return users.size(); }

  /// Radius of the one-slot reachable disk around the current position.
  double step_radius() const { return max_speed * slot_length; }
  /// Distance to the destination allowed after this slot.
  double reach_radius() const { return max_speed * (num_slots - slot) * slot_length; }

  /// Uplink rate of user k when the UAV serves from `p` (bits/s).
  double rate(std::size_t k, const Vec2 & p) const
  {
    const auto & u = users[k];
    return rate_from_snr(u.snr, (p - u.position).squaredNorm(), u.channel);
  }

  /// Objective weight on an executed bit of user k.
  double bit_value(std::size_t k) const { return data_scale * data_scale * users[k].demand; }
  /// Objective weight on one Joule of UAV energy.
  double uav_energy_price() const { return energy_backlog * energy_scale; }
};

class InfeasibleProblem : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Builds the slot-n problem from the observed state. Arrivals of slot n are visible.
inline PerSlotProblem assemble_per_slot(const QueueState & queues,
                                        const std::vector<double> & arrivals,
                                        const Vec2 & uav_position,
                                        const std::vector<Vec2> & user_positions,
                                        const ScenarioConfig & c,
                                        int n)
{
  if (n < 1 || n > c.num_slots) throw std::out_of_range("slot index out of range");
  PerSlotProblem pb;
  pb.slot           = n;
  pb.num_slots      = c.num_slots;
  pb.energy_backlog = queues.energy;
  pb.tradeoff       = c.tradeoff_weight;
  pb.data_scale     = c.data_queue_scale;
  pb.energy_scale   = c.energy_queue_scale;
  pb.energy_budget  = c.uav_energy_budget;
  pb.capacitance    = c.capacitance;
  pb.uav_position   = uav_position;
  pb.destination    = c.uav_end;
  pb.max_speed      = c.max_speed;
  pb.slot_length    = c.slot_length;
  pb.propulsion     = c.propulsion;
  for (int k = 0; k < c.num_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    UserSlot u;
    u.backlog        = queues.data[ku];
    u.arrival        = arrivals[ku];
    u.demand         = u.backlog + u.arrival;
    u.position       = user_positions[ku];
    u.channel        = channel_params(c, k);
    u.snr            = snr_coefficient(uav_position, u.position, u.channel);
    u.weight         = c.energy_weight[ku];
    u.transmit_power = c.transmit_power[ku];
    u.cycles_per_bit = c.cycles_per_bit[ku];
    u.max_freq       = c.max_cpu_freq[ku];
    pb.users.push_back(u);
  }
  const double gap = (pb.destination - uav_position).norm();
  if (gap > pb.step_radius() + pb.reach_radius() + 1e-6) {
    throw InfeasibleProblem("slot " + std::to_string(n) + ": destination unreachable from current position");
  }
  return pb;
}

/**
 * @brief Turns raw controls into a consistent SlotDecision.
 *
 * Frequencies are clipped to [0, f_max], local bits to the demand, and
 * offloaded bits to the remaining demand. The recorded offloading time is the
 * time actually needed to send those bits; offloads below one bit are dropped.
 */
inline SlotDecision finalize_decision(const PerSlotProblem & pb,
                                      const std::vector<double> & cpu_freq,
                                      const std::vector<double> & offload_time,
                                      const Vec2 & next_position)
{
  const auto K = pb.num_users();
  SlotDecision d;
  d.cpu_freq.resize(K);
  d.offload_time.resize(K);
  d.local_bits.resize(K);
  d.offload_bits.resize(K);
  d.local_energy.resize(K);
  d.offload_energy.resize(K);
  d.next_position = next_position;
  const double dt = pb.slot_length;
  for (std::size_t k = 0; k < K; ++k) {
    const auto & u = pb.users[k];
    double f = std::clamp(cpu_freq[k], 0.0, u.max_freq);
    if (f * dt / u.cycles_per_bit > u.demand) f = u.demand * u.cycles_per_bit / dt;
    const auto local = local_execution(f, dt, u.cycles_per_bit, pb.capacitance);
    const double rate = pb.rate(k, next_position);
    const double room = std::max(u.demand - local.bits, 0.0);
    double bits = std::min(std::max(offload_time[k], 0.0) * rate, room);
    double time = rate > 0.0 ? bits / rate : 0.0;
    if (bits < 1.0) {
      bits = 0.0;
      time = 0.0;
    }
    d.cpu_freq[k]       = f;
    d.offload_time[k]   = time;
    d.local_bits[k]     = local.bits;
    d.local_energy[k]   = local.energy;
    d.offload_bits[k]   = bits;
    d.offload_energy[k] = time * u.transmit_power;
  }
  d.uav_energy = propulsion_energy(pb.uav_position, next_position, dt, pb.propulsion);
  return d;
}

struct FeasibilityTolerance
{
  double position = 1e-6;  ///< m
  double time     = 1e-9;  ///< s
  double bits     = 1e-3;
};

/// Largest violation of the per-slot constraints, 0 when feasible; each term in its own unit.
inline double constraint_violation(const PerSlotProblem & pb, const SlotDecision & d, const FeasibilityTolerance & tol = {})
{
  double worst = 0.0;
  double total_time = 0.0;
  for (std::size_t k = 0; k < pb.num_users(); ++k) {
    const auto & u = pb.users[k];
    worst = std::max(worst, -d.cpu_freq[k] / std::max(u.max_freq, 1.0));
    worst = std::max(worst, (d.cpu_freq[k] - u.max_freq) / std::max(u.max_freq, 1.0) - 1e-12);
    worst = std::max(worst, -d.offload_time[k] - tol.time);
    worst = std::max(worst, d.executed_bits(k) - u.demand - tol.bits);
    total_time += d.offload_time[k];
  }
  worst = std::max(worst, total_time - pb.slot_length - tol.time);
  worst = std::max(worst, (d.next_position - pb.uav_position).norm() - pb.step_radius() - tol.position);
  worst = std::max(worst, (pb.destination - d.next_position).norm() - pb.reach_radius() - tol.position);
  return worst;
}

class ConstraintViolation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Exact per-slot objective at a decision; throws when a constraint is violated beyond tolerance.
inline double objective_value(const PerSlotProblem & pb, const SlotDecision & d, const FeasibilityTolerance & tol = {})
{
  if (const double v = constraint_violation(pb, d, tol); v > 0.0) {
    throw ConstraintViolation("decision violates per-slot constraints by " + std::to_string(v));
  }
  double value = pb.uav_energy_price() * d.uav_energy;
  for (std::size_t k = 0; k < pb.num_users(); ++k) {
    value += pb.tradeoff * pb.users[k].weight * d.user_energy(k);
    value -= pb.bit_value(k) * d.executed_bits(k);
  }
  return value;
}

/// Worst-case per-slot UAV energy, Delta * max(P(0), P(v_m)).
inline double max_slot_energy(const ScenarioConfig & c)
{
  return c.slot_length * std::max(propulsion_power(0.0, c.propulsion), propulsion_power(c.max_speed, c.propulsion));
}

/// Finite constant of the drift-plus-penalty bound, in scaled queue units.
inline double bound_constant(const ScenarioConfig & c)
{
  const double su = c.energy_queue_scale;
  const double sq = c.data_queue_scale;
  const double eu = c.uav_energy_budget;
  const double emax = max_slot_energy(c);
  double b = 0.5 * std::max(su * su * eu * eu, su * su * (emax - eu) * (emax - eu));
  for (int k = 0; k < c.num_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double served = c.max_cpu_freq[ku] * c.slot_length / c.cycles_per_bit[ku]
                        + peak_rate(channel_params(c, k)) * c.slot_length;
    b += 0.5 * (sq * sq * c.task_bits[ku] * c.task_bits[ku] + sq * sq * served * served);
  }
  return b;
}

struct DriftReport
{
  int slots_checked     = 0;
  int energy_violations = 0;  ///< squared virtual-queue inequality
  int data_violations   = 0;  ///< squared task-queue inequality, counted per user
  int bound_violations  = 0;  ///< aggregated drift-plus-penalty bound
  double min_slack      = 0.0;  ///< smallest RHS - LHS of the aggregated bound
  double bound_constant = 0.0;
  std::vector<int> violating_slots;

  bool ok() const { return energy_violations == 0 && data_violations == 0 && bound_violations == 0; }
};

/**
 * @brief Checks the realized (non-expected) per-slot drift inequalities on a trace.
 *
 * For every slot it verifies the squared-update inequalities of the virtual
 * and task queues and the aggregated bound
 * L(Q[n+1]) - L(Q[n]) + V E_s <= B + Q_u dE + V E_s + sum(Q_k A_k - q_k l_k),
 * all in scaled units.
 */
inline DriftReport drift_bound_check(const EpisodeTrace & trace, const ScenarioConfig & c)
{
  DriftReport r;
  r.bound_constant = bound_constant(c);
  r.min_slack = std::numeric_limits<double>::infinity();
  const double su = c.energy_queue_scale;
  const double sq = c.data_queue_scale;
  auto leq = [](double lhs, double rhs, double magnitude) { return lhs <= rhs + 1e-9 * (magnitude + 1.0); };

  for (std::size_t i = 0; i < trace.slots.size(); ++i) {
    const auto & s = trace.slots[i];
    const int n = s.slot;
    bool bad = false;

    const double qu = su * trace.energy_backlog(n);
    const double qu_next = su * trace.energy_backlog(n + 1);
    const double de = su * (s.decision.uav_energy - c.uav_energy_budget);
    const double e_lhs = 0.5 * (qu_next * qu_next - qu * qu);
    const double e_rhs = 0.5 * de * de + qu * de;
    if (!leq(e_lhs, e_rhs, qu_next * qu_next + qu * qu + de * de)) {
      ++r.energy_violations;
      bad = true;
    }

    double lyap_now = 0.5 * qu * qu;
    double lyap_next = 0.5 * qu_next * qu_next;
    double rhs = r.bound_constant + qu * de + c.tradeoff_weight * s.weighted_energy;
    double magnitude = qu_next * qu_next + qu * qu + r.bound_constant;
    for (std::size_t k = 0; k < s.backlog.size(); ++k) {
      const double q = sq * trace.backlog(n, k);
      const double q_next = sq * trace.backlog(n + 1, k);
      const double a = sq * s.arrivals[k];
      const double l = sq * s.decision.executed_bits(k);
      const double d_lhs = 0.5 * (q_next * q_next - q * q);
      const double d_rhs = 0.5 * (a * a + l * l) + q * a - q * l - a * l;
      const double mag = q_next * q_next + q * q + a * a + l * l;
      if (!leq(d_lhs, d_rhs, mag)) {
        ++r.data_violations;
        bad = true;
      }
      lyap_now += 0.5 * q * q;
      lyap_next += 0.5 * q_next * q_next;
      rhs += q * a - (q + a) * l;
      magnitude += mag;
    }
    const double lhs = lyap_next - lyap_now + c.tradeoff_weight * s.weighted_energy;
    r.min_slack = std::min(r.min_slack, rhs - lhs);
    if (!leq(lhs, rhs, magnitude)) {
      ++r.bound_violations;
      bad = true;
    }
    if (bad) r.violating_slots.push_back(n);
    ++r.slots_checked;
  }
  if (r.slots_checked == 0) r.min_slack = 0.0;
  return r;
}

}  // namespace uavmec

#endif  // UAVMEC__LYAPUNOV_HPP_
