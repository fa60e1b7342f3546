#ifndef UAVMEC__BARRIER_HPP_
#define UAVMEC__BARRIER_HPP_

/**
 * @file
 * @brief Log-barrier Newton method for small dense smooth convex programs.
 *
 * Solves
 * \f[
 *   \min_x f(x) \quad \text{s.t.} \quad g_i(x) \le 0, \; i = 1..m,
 * \f]
 * with f and every g_i convex and twice differentiable on the strictly
 * feasible set, starting from a strictly feasible point.
 */

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>

namespace uavmec {

using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;

// clang-format off
template<typename P>
concept SmoothConvexProgram = requires(const P & p, const VectorX & x, VectorX & g, MatrixX & H, std::size_t i, double s)
{
  { p.dimension() } -> std::convertible_to<Eigen::Index>;
  { p.num_constraints() } -> std::convertible_to<std::size_t>;
  { p.objective(x) } -> std::convertible_to<double>;
  { p.objective_derivatives(x, g, H) };  // overwrites g and H
  { p.constraint(i, x) } -> std::convertible_to<double>;
  { p.constraint_gradient(i, x, g) };  // overwrites g
  { p.add_constraint_hessian(i, x, s, H) };  // H += s * hessian of g_i
};
// clang-format on

enum class SolverStatus { Converged, MaxIterations, InfeasibleStart, LostFeasibility };

inline const char * to_string(SolverStatus s)
{
  switch (s) {
  case SolverStatus::Converged: return "converged";
  case SolverStatus::MaxIterations: return "max_iterations";
  case SolverStatus::InfeasibleStart: return "infeasible_start";
  case SolverStatus::LostFeasibility: return "lost_feasibility";
  }
  return "unknown";
}

struct BarrierOptions
{
  double initial_t      = 0.1;
  bool relative_initial_t = true;   ///< scale initial_t by m / max(1, |f(start)|)
  double t_growth       = 10.0;
  double gap_tolerance  = 1e-9;  ///< m / t relative to max(1, |f|)
  double newton_tolerance = 1e-8;   ///< half squared Newton decrement
  double polish_tolerance = 1e-14;  ///< same, for the final stage
  int polish_steps      = 3;
  double full_step_decrement = 1e-6;  ///< squared decrement below which the undamped step is taken
  int max_newton_steps  = 100;  ///< per barrier stage
  int max_stages        = 40;
  double armijo         = 0.25;
  double backtrack      = 0.5;
  double stationarity_tolerance = 1e-5;
};

struct SolverReport
{
  VectorX primal;
  VectorX duals;  ///< central-path multiplier estimates 1 / (-t g_i)
  double objective = std::numeric_limits<double>::quiet_NaN();
  double max_violation = 0.0;
  double stationarity  = 0.0;  ///< ||grad f + sum lambda_i grad g_i|| / max(1, ||grad f||)
  double gap = std::numeric_limits<double>::infinity();  ///< m / t at the returned point
  int iterations = 0;  ///< Newton steps over all stages
  SolverStatus status = SolverStatus::MaxIterations;

  bool converged() const { return status == SolverStatus::Converged; }
};

template<SmoothConvexProgram P>
bool strictly_feasible(const P & prog, const VectorX & x)
{
  for (std::size_t i = 0; i < prog.num_constraints(); ++i) {
    const double g = prog.constraint(i, x);
    if (!(g < 0.0)) return false;
  }
  return true;
}

template<SmoothConvexProgram P>
double max_constraint(const P & prog, const VectorX & x)
{
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prog.num_constraints(); ++i) worst = std::max(worst, prog.constraint(i, x));
  return worst;
}

namespace detail {

/// t f(x) - sum log(-g_i(x)); +inf outside the strict interior.
template<SmoothConvexProgram P>
double barrier_value(const P & prog, const VectorX & x, double t)
{
  double value = t * prog.objective(x);
  for (std::size_t i = 0; i < prog.num_constraints(); ++i) {
    const double g = prog.constraint(i, x);
    if (!(g < 0.0)) return std::numeric_limits<double>::infinity();
    value -= std::log(-g);
  }
  return value;
}

}  // namespace detail

template<SmoothConvexProgram P>
SolverReport solve_barrier(const P & prog, const VectorX & start, const BarrierOptions & opt = {})
{
  const Eigen::Index n = prog.dimension();
  const std::size_t m = prog.num_constraints();
  SolverReport rep;
  rep.primal = start;
  rep.duals = VectorX::Zero(static_cast<Eigen::Index>(m));
  if (!strictly_feasible(prog, start)) {
    rep.status = SolverStatus::InfeasibleStart;
    rep.max_violation = std::max(0.0, max_constraint(prog, start));
    return rep;
  }

  VectorX x = start;
  VectorX grad(n), gi(n), dx(n), trial(n);
  MatrixX hess(n, n);
  double t = opt.initial_t;
  if (opt.relative_initial_t) t *= static_cast<double>(std::max<std::size_t>(m, 1)) / std::max(1.0, std::abs(prog.objective(start)));
  bool done = false;

  // Damped Newton centering at the current t.
  auto center = [&](double tol, int max_steps) {
    for (int step = 0; step < max_steps; ++step) {
      prog.objective_derivatives(x, grad, hess);
      grad *= t;
      hess *= t;
      for (std::size_t i = 0; i < m; ++i) {
        const double g = prog.constraint(i, x);
        const double inv = -1.0 / g;
        prog.constraint_gradient(i, x, gi);
        grad.noalias() += inv * gi;
        hess.noalias() += (inv * inv) * gi * gi.transpose();
        prog.add_constraint_hessian(i, x, inv, hess);
      }
      Eigen::LDLT<MatrixX> ldlt(hess);
      dx = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        // Regularize a numerically singular Hessian.
        const double ridge = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        hess.diagonal().array() += ridge;
        dx = hess.ldlt().solve(-grad);
      }
      const double decrement2 = -grad.dot(dx);
      ++rep.iterations;
      if (!(decrement2 > 2.0 * tol)) return;
      trial = x + dx;
      if (decrement2 < opt.full_step_decrement && std::isfinite(detail::barrier_value(prog, trial, t))) {
        // Quadratic convergence region, where the decrease can fall below the barrier value's resolution.
        x = trial;
        continue;
      }
      const double phi0 = detail::barrier_value(prog, x, t);
      double s = 1.0;
      int backtracks = 0;
      for (;;) {
        trial = x + s * dx;
        const double phi = detail::barrier_value(prog, trial, t);
        if (phi <= phi0 - opt.armijo * s * decrement2) break;
        s *= opt.backtrack;
        // No decrease representable in floating point.
        if (++backtracks > 60) return;
      }
      x = trial;
    }
  };

  for (int stage = 0; stage < opt.max_stages && !done; ++stage) {
    center(opt.newton_tolerance, opt.max_newton_steps);
    const double f = prog.objective(x);
    if (static_cast<double>(m) / t < opt.gap_tolerance * std::max(1.0, std::abs(f))) {
      done = true;
      center(opt.polish_tolerance, opt.polish_steps);
    } else {
      t *= opt.t_growth;
    }
  }

  rep.primal = x;
  rep.objective = prog.objective(x);
  if (!strictly_feasible(prog, x)) {
    rep.status = SolverStatus::LostFeasibility;
    rep.max_violation = std::max(0.0, max_constraint(prog, x));
    return rep;
  }
  prog.objective_derivatives(x, grad, hess);
  VectorX lagrangian = grad;
  for (std::size_t i = 0; i < m; ++i) {
    const double lam = 1.0 / (-t * prog.constraint(i, x));
    rep.duals(static_cast<Eigen::Index>(i)) = lam;
    prog.constraint_gradient(i, x, gi);
    lagrangian.noalias() += lam * gi;
  }
  rep.max_violation = 0.0;
  rep.stationarity = lagrangian.norm() / std::max(1.0, grad.norm());
  rep.gap = static_cast<double>(m) / t;
  rep.status = (done && rep.stationarity <= opt.stationarity_tolerance) ? SolverStatus::Converged
                                                                         : SolverStatus::MaxIterations;
  return rep;
}

}  // namespace uavmec

#endif  // UAVMEC__BARRIER_HPP_
