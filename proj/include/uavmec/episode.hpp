#ifndef UAVMEC__EPISODE_HPP_
#define UAVMEC__EPISODE_HPP_

/**
 * @file
 * @brief Online control loop over an episode and the metrics derived from its trace.
 */

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "config.hpp"
#include "lyapunov.hpp"
#include "mobility.hpp"
#include "rng.hpp"
#include "sca.hpp"
#include "system.hpp"
#include "trace.hpp"

namespace uavmec {

/// Bernoulli task arrivals: I_k bits with probability rho_k, else 0.
inline std::vector<double> sample_arrivals(const ScenarioConfig & c, Rng & rng)
{
  std::vector<double> a(static_cast<std::size_t>(c.num_users), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::bernoulli_distribution arrive(c.arrival_prob[k]);
    a[k] = arrive(rng) ? c.task_bits[k] : 0.0;
  }
  return a;
}

class EpisodeAborted : public std::runtime_error
{
public:
  EpisodeAborted(int slot, const std::string & what)
      : std::runtime_error("episode aborted at slot " + std::to_string(slot) + ": " + what), slot_(slot)
  {}
  int slot() const { return slot_; }

private:
  int slot_;
};

inline SlotDecision decide(PolicyId policy, const PerSlotProblem & pb, const ScaOptions & opt)
{
  switch (policy) {
  case PolicyId::Go: return go_step(pb);
  case PolicyId::Ge: return ge_step(pb);
  case PolicyId::Joint: break;
  }
  return solve_p2(pb, opt).decision;
}

/**
 * @brief Runs the online controller for N slots.
 *
 * Each slot observes queues, arrivals and user positions, decides with the
 * policy, then updates the task queues, the virtual energy queue, the UAV
 * position and the users. Mobility and arrivals draw from separate streams of
 * the config seed, so every policy sees the same randomness.
 */
inline EpisodeTrace run_episode(const ScenarioConfig & c, PolicyId policy)
{
  validate(c);
  Rng mobility = make_stream(c.seed, Stream::Mobility);
  Rng arrivals = make_stream(c.seed, Stream::Arrivals);
  const auto K = static_cast<std::size_t>(c.num_users);
  const ScaOptions opt = sca_options(c);

  std::vector<UserKinematics> users(K);
  for (std::size_t k = 0; k < K; ++k) users[k] = {c.user_start[k], c.mean_velocity};
  QueueState queues{std::vector<double>(K, 0.0), 0.0};
  Vec2 uav = c.uav_start;

  EpisodeTrace trace;
  trace.policy = to_string(policy);
  trace.config = c;
  trace.slots.reserve(static_cast<std::size_t>(c.num_slots));
  for (int n = 1; n <= c.num_slots; ++n) {
    SlotRecord rec;
    rec.slot = n;
    rec.backlog = queues.data;
    rec.arrivals = sample_arrivals(c, arrivals);
    rec.energy_backlog = queues.energy / c.energy_queue_scale;
    rec.uav_position = uav;
    for (const auto & u : users) rec.user_positions.push_back(u.position);
    try {
      const PerSlotProblem pb = assemble_per_slot(queues, rec.arrivals, uav, rec.user_positions, c, n);
      rec.decision = decide(policy, pb, opt);
      rec.objective = objective_value(pb, rec.decision);
    } catch (const std::exception & e) {
      throw EpisodeAborted(n, e.what());
    }
    const auto & d = rec.decision;
    rec.weighted_energy = d.weighted_energy(c.energy_weight);
    for (std::size_t k = 0; k < K; ++k) {
      queues.data[k] = update_task_queue(queues.data[k], rec.arrivals[k], d.executed_bits(k));
    }
    queues.energy = update_virtual_queue(queues.energy, d.uav_energy, c.uav_energy_budget, c.energy_queue_scale);
    uav = d.next_position;
    for (auto & u : users) u = advance(u, c, mobility);
    trace.slots.push_back(std::move(rec));
  }
  trace.final_backlog = queues.data;
  trace.final_energy_backlog = queues.energy / c.energy_queue_scale;
  trace.final_uav_position = uav;
  for (const auto & u : users) trace.final_user_positions.push_back(u.position);
  return trace;
}

/// Mean of the first n entries, 1 <= n <= size.
inline double moving_average(const std::vector<double> & series, std::size_t n)
{
  if (n < 1 || n > series.size()) throw std::out_of_range("moving_average: n outside [1, length]");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += series[i];
  return s / static_cast<double>(n);
}

/// Prefix means (1/n) sum_{tau <= n} of a series.
inline std::vector<double> moving_averages(const std::vector<double> & series)
{
  std::vector<double> out(series.size());
  double s = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    s += series[i];
    out[i] = s / static_cast<double>(i + 1);
  }
  return out;
}

inline std::vector<double> uav_energy_series(const EpisodeTrace & t)
{
  std::vector<double> out;
  for (const auto & s : t.slots) out.push_back(s.decision.uav_energy);
  return out;
}

/// Weighted sum of UE energies per slot, J.
inline std::vector<double> system_energy_series(const EpisodeTrace & t)
{
  std::vector<double> out;
  for (const auto & s : t.slots) out.push_back(s.weighted_energy);
  return out;
}

/// Mean UE backlog at the start of each slot, Mbits.
inline std::vector<double> queue_series(const EpisodeTrace & t)
{
  std::vector<double> out;
  for (const auto & s : t.slots) {
    double q = 0.0;
    for (double b : s.backlog) q += b;
    out.push_back(s.backlog.empty() ? 0.0 : q / static_cast<double>(s.backlog.size()) * 1e-6);
  }
  return out;
}

struct KinematicsReport
{
  double final_distance = 0.0;   ///< ||p_u[N+1] - p_F||, m
  double speed_excess   = 0.0;   ///< max over slots of step length - v_m Delta, m
  double reach_excess   = 0.0;   ///< max over slots of ||p_F - p_u[n+1]|| - v_m (N - n) Delta, m
};

inline KinematicsReport kinematics_report(const EpisodeTrace & t)
{
  const auto & c = t.config;
  KinematicsReport r;
  r.speed_excess = -std::numeric_limits<double>::infinity();
  r.reach_excess = -std::numeric_limits<double>::infinity();
  for (const auto & s : t.slots) {
    const Vec2 next = t.uav_position(s.slot + 1);
    r.speed_excess = std::max(r.speed_excess, (next - s.uav_position).norm() - c.max_speed * c.slot_length);
    r.reach_excess = std::max(r.reach_excess,
                              (c.uav_end - next).norm() - c.max_speed * (c.num_slots - s.slot) * c.slot_length);
  }
  r.final_distance = (t.final_uav_position - c.uav_end).norm();
  return r;
}

struct EpisodeSummary
{
  std::string policy;
  std::uint64_t seed = 0;
  int slots = 0;
  double avg_uav_energy    = 0.0;  ///< terminal moving average, J
  double avg_queue_mbits   = 0.0;  ///< terminal moving average of the mean UE backlog
  double avg_system_energy = 0.0;  ///< terminal moving average of the weighted UE energy, J
  double total_uav_energy  = 0.0;
  double total_system_energy = 0.0;
  double total_bits_executed = 0.0;
  double total_bits_arrived  = 0.0;
  double final_energy_backlog = 0.0;  ///< J
  int total_sca_iterations = 0;
  int max_sca_iterations   = 0;
  KinematicsReport kinematics;
  DriftReport drift;
};

inline EpisodeSummary summarize(const EpisodeTrace & t)
{
  EpisodeSummary s;
  s.policy = t.policy;
  s.seed = t.config.seed;
  s.slots = static_cast<int>(t.size());
  if (t.size() == 0) return s;
  const auto e = uav_energy_series(t);
  const auto q = queue_series(t);
  const auto es = system_energy_series(t);
  s.avg_uav_energy = moving_average(e, e.size());
  s.avg_queue_mbits = moving_average(q, q.size());
  s.avg_system_energy = moving_average(es, es.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto & r = t.slots[i];
    s.total_uav_energy += e[i];
    s.total_system_energy += es[i];
    for (std::size_t k = 0; k < r.arrivals.size(); ++k) {
      s.total_bits_executed += r.decision.executed_bits(k);
      s.total_bits_arrived += r.arrivals[k];
    }
    s.total_sca_iterations += r.decision.sca_iterations;
    s.max_sca_iterations = std::max(s.max_sca_iterations, r.decision.sca_iterations);
  }
  s.final_energy_backlog = t.final_energy_backlog;
  s.kinematics = kinematics_report(t);
  s.drift = drift_bound_check(t, t.config);
  return s;
}

}  // namespace uavmec

#endif  // UAVMEC__EPISODE_HPP_
