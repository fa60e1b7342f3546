#ifndef UAVMEC__TRACE_HPP_
#define UAVMEC__TRACE_HPP_

#include <string>
#include <vector>

#include "config.hpp"
#include "system.hpp"

namespace uavmec {

/// Everything observed and decided in one slot. Queues are physical (bits, J).
struct SlotRecord
{
  int slot = 0;  ///< 1-based
  std::vector<double> backlog;   ///< Q_k[n], bits
  std::vector<double> arrivals;  ///< A_k[n], bits
  double energy_backlog = 0.0;   ///< Q_u[n] in J (scaled queue divided by s_u)
  Vec2 uav_position{0.0, 0.0};   ///< p_u[n]
  std::vector<Vec2> user_positions;
  SlotDecision decision;
  double weighted_energy = 0.0;  ///< E_s[n], J
  double objective = 0.0;        ///< per-slot drift-plus-penalty objective at the applied decision
};

struct EpisodeTrace
{
  std::string policy;
  ScenarioConfig config;
  std::vector<SlotRecord> slots;
  std::vector<double> final_backlog;  ///< Q_k[N+1]
  double final_energy_backlog = 0.0;  ///< Q_u[N+1], J
  Vec2 final_uav_position{0.0, 0.0};  ///< p_u[N+1]
  std::vector<Vec2> final_user_positions;  ///< p_k[N+1]

  std::size_t size() const { return slots.size(); }

  /// Q_k[n] for n in 1..N+1.
  double backlog(int n, std::size_t k) const
  {
    return n <= static_cast<int>(slots.size()) ? slots[static_cast<std::size_t>(n - 1)].backlog[k]
                                               : final_backlog[k];
  }
  double energy_backlog(int n) const
  {
    return n <= static_cast<int>(slots.size()) ? slots[static_cast<std::size_t>(n - 1)].energy_backlog
                                               : final_energy_backlog;
  }
  Vec2 uav_position(int n) const
  {
    return n <= static_cast<int>(slots.size()) ? slots[static_cast<std::size_t>(n - 1)].uav_position
                                               : final_uav_position;
  }
};

}  // namespace uavmec

#endif  // UAVMEC__TRACE_HPP_
