#ifndef UAVMEC__SCA_HPP_
#define UAVMEC__SCA_HPP_

/**
 * @file
 * @brief Successive convex approximation of the per-slot joint problem.
 *
 * Each iteration builds the convex subproblem at the current decision, solves
 * it, and maps the solution back to a physical decision. The objective is
 * evaluated exactly at every decision, and the loop stops once it changes by
 * less than the tolerance.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "lyapunov.hpp"
#include "solver.hpp"
#include "surrogates.hpp"

namespace uavmec {

class SolverFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ScaOptions
{
  double tolerance   = 0.01;
  int max_iterations = 50;
  BarrierOptions barrier{};
};

inline ScaOptions sca_options(const ScenarioConfig & c)
{
  ScaOptions o;
  o.tolerance = c.sca_tolerance;
  o.max_iterations = c.sca_max_iterations;
  return o;
}

struct ScaResult
{
  SlotDecision decision;
  std::vector<double> objective_history;  ///< G at the start point, then after each iteration
  double objective = 0.0;  ///< G at the returned decision
  int iterations = 0;
  bool converged = false;
  bool fixed_position = false;  ///< kinematic set reduced to a point
};

/// Surrogate point of a physical decision; psi is the square root of the offloaded bits.
inline SurrogatePoint surrogate_point(const PerSlotProblem & pb, const SlotDecision & d)
{
  SurrogatePoint s;
  s.position = d.next_position;
  s.offload_time = d.offload_time;
  s.cpu_freq = d.cpu_freq;
  s.speed_slack = y_local(d.next_position, pb.uav_position, pb.slot_length, pb.propulsion.hover_velocity4);
  s.sqrt_bits.resize(d.offload_bits.size());
  for (std::size_t k = 0; k < d.offload_bits.size(); ++k) s.sqrt_bits[k] = std::sqrt(d.offload_bits[k]);
  return s;
}

/// Hover, or the shortest move toward the destination that keeps it reachable.
inline Vec2 initial_position(const PerSlotProblem & pb)
{
  const Vec2 gap = pb.destination - pb.uav_position;
  const double dist = gap.norm();
  const double reach = pb.reach_radius();
  if (dist <= reach) return pb.uav_position;
  const double move = dist - reach;
  if (move > pb.step_radius() + 1e-6) throw InfeasibleProblem("slot " + std::to_string(pb.slot) + ": destination unreachable");
  return pb.uav_position + gap * (std::min(move, pb.step_radius()) / dist);
}

/// Zero local computing and equal offloading time at `p`, capped by each user's demand.
inline SlotDecision initial_decision(const PerSlotProblem & pb, const Vec2 & p)
{
  const auto K = pb.num_users();
  const std::vector<double> f(K, 0.0);
  const std::vector<double> delta(K, pb.slot_length / static_cast<double>(std::max<std::size_t>(K, 1)));
  return finalize_decision(pb, f, delta, p);
}

inline SurrogatePoint initial_point(const PerSlotProblem & pb)
{
  return surrogate_point(pb, initial_decision(pb, initial_position(pb)));
}

/// Speed in [0, v_max] minimizing propulsion power.
inline double economical_speed(const PropulsionParams & prm, double v_max)
{
  double lo = 0.0;
  double hi = v_max;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (propulsion_power(a, prm) < propulsion_power(b, prm)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  const double v = 0.5 * (lo + hi);
  return propulsion_power(v, prm) < propulsion_power(0.0, prm) ? v : 0.0;
}

/// Runs the SCA loop from `start`, which must satisfy the per-slot constraints.
inline ScaResult sca_solve(const PerSlotProblem & pb, const SlotDecision & start, const ScaOptions & opt = {})
{
  ScaResult res;
  const Lens lens = kinematic_lens(pb);
  if (pb.slot >= pb.num_slots || lens.degenerate()) {
    res.decision = solve_fixed_position(pb, lens.center());
    res.objective = objective_value(pb, res.decision);
    res.objective_history = {res.objective};
    res.iterations = 1;
    res.converged = true;
    res.fixed_position = true;
    res.decision.sca_iterations = 1;
    return res;
  }
  SlotDecision current = start;
  double g = objective_value(pb, current);
  res.objective_history.push_back(g);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const ConvexSubproblem sub(pb, surrogate_point(pb, current));
    const SolverReport rep = solve_p3(sub, opt.barrier);
    if (rep.status == SolverStatus::InfeasibleStart || rep.status == SolverStatus::LostFeasibility) {
      throw SolverFailure("slot " + std::to_string(pb.slot) + ": inner solver " + to_string(rep.status));
    }
    const SubproblemPoint sp = sub.decode(rep.primal);
    const SlotDecision next = finalize_decision(pb, sp.cpu_freq, sp.offload_time, sp.position);
    const double g_next = objective_value(pb, next);
    res.objective_history.push_back(g_next);
    res.iterations = it;
    const bool better = g_next <= g;
    if (better) current = next;
    if (std::abs(g_next - g) < opt.tolerance || !better) {
      res.converged = std::abs(g_next - g) < opt.tolerance;
      g = std::min(g, g_next);
      break;
    }
    g = g_next;
  }
  res.decision = current;
  res.decision.sca_iterations = res.iterations;
  res.objective = g;
  return res;
}

/// Candidate start positions: hover or minimal pull, center pursuit, economical-speed moves and the lens center.
inline std::vector<Vec2> start_positions(const PerSlotProblem & pb)
{
  const Lens lens = kinematic_lens(pb);
  std::vector<Vec2> out{initial_position(pb), pursuit_position(pb)};
  const double v = economical_speed(pb.propulsion, pb.max_speed);
  auto toward = [&](const Vec2 & target) {
    const Vec2 d = target - pb.uav_position;
    const double n = d.norm();
    if (n <= 0.0) return;
    out.push_back(lens.project(pb.uav_position + d * (std::min(n, v * pb.slot_length) / n)));
  };
  Vec2 centre(0.0, 0.0);
  double total = 0.0;
  for (const auto & u : pb.users) {
    centre += u.demand * u.position;
    total += u.demand;
  }
  if (total > 0.0) toward(centre / total);
  toward(pb.destination);
  out.push_back(lens.center());
  return out;
}

/**
 * @brief Best SCA result over several start points.
 *
 * Each start position is paired with its exact fixed-position resource
 * allocation. A start whose SCA run fails is skipped. If every start fails,
 * the lens center with the zero-computing allocation is retried once before
 * giving up.
 */
inline ScaResult solve_p2(const PerSlotProblem & pb, const ScaOptions & opt = {})
{
  std::optional<ScaResult> best;
  std::string last_error;
  for (const Vec2 & p : start_positions(pb)) {
    try {
      ScaResult r = sca_solve(pb, solve_fixed_position(pb, p), opt);
      if (!best || r.objective < best->objective - 1e-12) best = std::move(r);
      if (best->fixed_position) break;
    } catch (const std::exception & e) {
      last_error = e.what();
    }
  }
  if (!best) {
    try {
      best = sca_solve(pb, initial_decision(pb, kinematic_lens(pb).center()), opt);
    } catch (const std::exception & e) {
      throw SolverFailure("slot " + std::to_string(pb.slot) + ": all SCA starts failed: " + e.what());
    }
  }
  return *best;
}

}  // namespace uavmec

#endif  // UAVMEC__SCA_HPP_
