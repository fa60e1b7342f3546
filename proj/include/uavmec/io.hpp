#ifndef UAVMEC__IO_HPP_
#define UAVMEC__IO_HPP_

/**
 * @file
 * @brief Run artifacts: per-slot trace CSV, trajectory CSV and JSON summary.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "episode.hpp"
#include "trace.hpp"

namespace uavmec {

namespace detail {

inline std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Header `n,Qu,Q1..QK,E_uav,E_sys,x_u,y_u,x_1,y_1,...,sca_iters`; one row per slot, queues at slot start.
inline void write_trace_csv(std::ostream & os, const EpisodeTrace & t)
{
  const std::size_t K = static_cast<std::size_t>(t.config.num_users);
  os << "n,Qu";
  for (std::size_t k = 1; k <= K; ++k) os << ",Q" << k;
  os << ",E_uav,E_sys,x_u,y_u";
  for (std::size_t k = 1; k <= K; ++k) os << ",x_" << k << ",y_" << k;
  os << ",sca_iters\n";
  for (const auto & s : t.slots) {
    os << s.slot << ',' << detail::num(s.energy_backlog);
    for (double q : s.backlog) os << ',' << detail::num(q);
    os << ',' << detail::num(s.decision.uav_energy) << ',' << detail::num(s.weighted_energy);
    os << ',' << detail::num(s.uav_position.x()) << ',' << detail::num(s.uav_position.y());
    for (const auto & p : s.user_positions) os << ',' << detail::num(p.x()) << ',' << detail::num(p.y());
    os << ',' << s.decision.sca_iterations << '\n';
  }
}

/// UAV and user positions for n = 1..N+1.
inline void write_positions_csv(std::ostream & os, const EpisodeTrace & t)
{
  const std::size_t K = static_cast<std::size_t>(t.config.num_users);
  os << "n,x_u,y_u";
  for (std::size_t k = 1; k <= K; ++k) os << ",x_" << k << ",y_" << k;
  os << '\n';
  auto row = [&](int n, const Vec2 & uav, const std::vector<Vec2> & users) {
    os << n << ',' << detail::num(uav.x()) << ',' << detail::num(uav.y());
    for (const auto & p : users) os << ',' << detail::num(p.x()) << ',' << detail::num(p.y());
    os << '\n';
  };
  for (const auto & s : t.slots) row(s.slot, s.uav_position, s.user_positions);
  row(static_cast<int>(t.size()) + 1, t.final_uav_position, t.final_user_positions);
}

inline nlohmann::json to_json(const EpisodeSummary & s)
{
  nlohmann::json j;
  j["policy"] = s.policy;
  j["seed"] = s.seed;
  j["slots"] = s.slots;
  j["terminal_moving_average"] = {
      {"uav_energy_J", s.avg_uav_energy},
      {"ue_queue_Mbits", s.avg_queue_mbits},
      {"system_energy_J", s.avg_system_energy},
  };
  j["totals"] = {
      {"uav_energy_J", s.total_uav_energy},
      {"system_energy_J", s.total_system_energy},
      {"bits_executed", s.total_bits_executed},
      {"bits_arrived", s.total_bits_arrived},
      {"sca_iterations", s.total_sca_iterations},
  };
  j["final_energy_backlog_J"] = s.final_energy_backlog;
  j["max_sca_iterations"] = s.max_sca_iterations;
  j["kinematics"] = {
      {"final_distance_m", s.kinematics.final_distance},
      {"max_speed_excess_m", s.kinematics.speed_excess},
      {"max_reach_excess_m", s.kinematics.reach_excess},
  };
  j["drift_bound"] = {
      {"slots_checked", s.drift.slots_checked},
      {"energy_violations", s.drift.energy_violations},
      {"data_violations", s.drift.data_violations},
      {"bound_violations", s.drift.bound_violations},
      {"min_slack", s.drift.min_slack},
      {"bound_constant", s.drift.bound_constant},
  };
  return j;
}

/// Writes trace.csv, positions.csv and summary.json into `dir`, creating it if needed.
inline void write_run(const std::filesystem::path & dir, const EpisodeTrace & t, const EpisodeSummary & s)
{
  std::filesystem::create_directories(dir);
  auto open = [&](const char * name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trace.csv");
    write_trace_csv(f, t);
  }
  {
    auto f = open("positions.csv");
    write_positions_csv(f, t);
  }
  {
    auto f = open("summary.json");
    f << to_json(s).dump(2) << '\n';
  }
}

}  // namespace uavmec

#endif  // UAVMEC__IO_HPP_
