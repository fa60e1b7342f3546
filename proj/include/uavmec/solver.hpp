#ifndef UAVMEC__SOLVER_HPP_
#define UAVMEC__SOLVER_HPP_

/**
 * @file
 * @brief Convex per-slot subproblem at a surrogate point, its barrier solve,
 * and the exact resource allocation at a fixed UAV position.
 *
 * Offloading users only (demand above one bit) carry variables. Inside the
 * solver the variables are scaled: frequency in GHz, offloading time in
 * slots, sqrt-bits in sqrt(Mbit), bits in Mbit and position offsets from the
 * current UAV position in units of 100 m.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "barrier.hpp"
#include "geometry.hpp"
#include "lyapunov.hpp"
#include "surrogates.hpp"

namespace uavmec {

inline Lens kinematic_lens(const PerSlotProblem & pb)
{
  return {{pb.uav_position, pb.step_radius()}, {pb.destination, pb.reach_radius()}};
}

/// Physical values of a subproblem solution, indexed over all users.
struct SubproblemPoint
{
  std::vector<double> cpu_freq;
  std::vector<double> offload_time;
  std::vector<double> sqrt_bits;
  std::vector<double> theta;  ///< concave lower bound of the offloaded bits
  Vec2 position{0.0, 0.0};
  double speed_slack = 0.0;
};

/**
 * @brief Convex approximation of the per-slot problem around a local point.
 *
 * Minimizes the scaled per-slot objective in which UAV induced power uses the
 * slack y and offloaded bits use theta, subject to frequency bounds, an
 * offloading-time floor, the TDMA simplex, the bit quota, the rate cone under
 * the concave rate bound, the slack cone under its affine bound, theta under
 * the tangent of psi^2, and the two kinematic disks.
 */
class ConvexSubproblem
{
public:
  static constexpr double freq_unit = 1e9;
  static constexpr double bit_unit  = 1e6;
  static constexpr double pos_unit  = 100.0;
  static constexpr double min_offload_time = 1e-9;  ///< s
  static constexpr double active_demand = 1.0;      ///< bits

  ConvexSubproblem(const PerSlotProblem & pb, const SurrogatePoint & local, double objective_weight = 1.0)
      : pb_(pb), local_(local), weight_(objective_weight)
  {
    const double dt = pb.slot_length;
    for (std::size_t k = 0; k < pb.num_users(); ++k) {
      if (pb.users[k].demand > active_demand) active_.push_back(k);
    }
    const auto & prop = pb.propulsion;
    c3_ = prop.hover_velocity4;
    slack_scale_ = 1.0 / std::sqrt(c3_);
    const double price = pb.uav_energy_price() * weight_;
    uav_const_ = price * dt * prop.blade_profile;
    uav_v2_ = price * dt * 3.0 * prop.blade_profile * pos_unit * pos_unit / (prop.tip_speed * prop.tip_speed * dt * dt);
    uav_v3_ = price * dt * prop.parasite * std::pow(pos_unit / dt, 3);
    uav_y_ = price * dt * prop.induced;

    step_ = local.position - pb.uav_position;
    y_l_ = local.speed_slack;
    dest_ = (pb.destination - pb.uav_position) / pos_unit;
    r1_ = pb.step_radius() / pos_unit;
    r2_ = pb.reach_radius() / pos_unit;

    for (auto k : active_) {
      const auto & u = pb.users[k];
      User c;
      c.fmax = u.max_freq / freq_unit;
      c.quota_coef = freq_unit * dt / (u.cycles_per_bit * bit_unit);
      c.demand = u.demand / bit_unit;
      c.floor = min_offload_time / dt;
      const double d2l = (local.position - u.position).squaredNorm();
      c.rate_l = rate_from_snr(u.snr, d2l, u.channel) / u.channel.bandwidth;
      c.beta = rate_slope(u.snr, d2l, u.channel) * pos_unit * pos_unit / u.channel.bandwidth;
      c.d2l = d2l / (pos_unit * pos_unit);
      c.user = (u.position - pb.uav_position) / pos_unit;
      c.rate_unit = u.channel.bandwidth / bit_unit;
      c.psi_l = local.sqrt_bits[k] / std::sqrt(bit_unit);
      const double vw = pb.tradeoff * u.weight * weight_;
      const double value = pb.bit_value(k) * weight_;
      c.obj_f3 = vw * pb.capacitance * std::pow(freq_unit, 3) * dt;
      c.obj_delta = vw * u.transmit_power * dt;
      c.obj_f = -value * freq_unit * dt / u.cycles_per_bit;
      c.obj_theta = -value * bit_unit;
      users_.push_back(c);
    }
    const auto z0 = interior_point_impl();
    y_cap_ = 2.0 * std::max(z0.y, std::pow(c3_, 0.25));
    interior_ = z0.x;
    interior_(y_index()) = z0.y;
  }

  // --- layout -------------------------------------------------------------
  std::size_t num_active() const { return active_.size(); }
  const std::vector<std::size_t> & active_users() const { return active_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(4 * active_.size() + 3); }
  std::size_t num_constraints() const { return 7 * active_.size() + 6; }
  Eigen::Index f_index(std::size_t j) const { return static_cast<Eigen::Index>(4 * j); }
  Eigen::Index delta_index(std::size_t j) const { return static_cast<Eigen::Index>(4 * j + 1); }
  Eigen::Index psi_index(std::size_t j) const { return static_cast<Eigen::Index>(4 * j + 2); }
  Eigen::Index theta_index(std::size_t j) const { return static_cast<Eigen::Index>(4 * j + 3); }
  Eigen::Index px_index() const { return static_cast<Eigen::Index>(4 * active_.size()); }
  Eigen::Index y_index() const { return static_cast<Eigen::Index>(4 * active_.size() + 2); }
  double speed_slack_cap() const { return y_cap_; }
  const PerSlotProblem & problem() const { return pb_; }
  const SurrogatePoint & local_point() const { return local_; }

  // --- objective ----------------------------------------------------------
  double objective(const VectorX & x) const
  {
    const Eigen::Vector2d p = x.segment<2>(px_index());
    const double r = p.norm();
    double value = uav_const_ + uav_v2_ * r * r + uav_v3_ * r * r * r + uav_y_ * x(y_index());
    for (std::size_t j = 0; j < users_.size(); ++j) {
      const auto & c = users_[j];
      const double f = x(f_index(j));
      value += c.obj_f3 * f * f * f + c.obj_delta * x(delta_index(j)) + c.obj_f * f + c.obj_theta * x(theta_index(j));
    }
    return value;
  }

  void objective_derivatives(const VectorX & x, VectorX & g, MatrixX & H) const
  {
    g.setZero(dimension());
    H.setZero(dimension(), dimension());
    for (std::size_t j = 0; j < users_.size(); ++j) {
      const auto & c = users_[j];
      const double f = x(f_index(j));
      g(f_index(j)) = 3.0 * c.obj_f3 * f * f + c.obj_f;
      g(delta_index(j)) = c.obj_delta;
      g(theta_index(j)) = c.obj_theta;
      H(f_index(j), f_index(j)) = 6.0 * c.obj_f3 * f;
    }
    const auto ip = px_index();
    const Eigen::Vector2d p = x.segment<2>(ip);
    const double r = p.norm();
    g.segment<2>(ip) = (2.0 * uav_v2_ + 3.0 * uav_v3_ * r) * p;
    Eigen::Matrix2d hp = (2.0 * uav_v2_ + 3.0 * uav_v3_ * r) * Eigen::Matrix2d::Identity();
    if (r > 0.0) hp += (3.0 * uav_v3_ / r) * p * p.transpose();
    H.block<2, 2>(ip, ip) = hp;
    g(y_index()) = uav_y_;
  }

  // --- constraints --------------------------------------------------------
  double constraint(std::size_t i, const VectorX & x) const
  {
    if (i < 7 * users_.size()) {
      const std::size_t j = i / 7;
      const auto & c = users_[j];
      const double f = x(f_index(j));
      const double dl = x(delta_index(j));
      const double psi = x(psi_index(j));
      const double th = x(theta_index(j));
      switch (i % 7) {
      case 0: return -f;
      case 1: return f - c.fmax;
      case 2: return c.floor - dl;
      case 3: return (c.quota_coef * f + psi * psi) / c.demand - 1.0;
      case 4: {
        if (!(dl > 0.0)) {
          // Closure of the perspective at zero offloading time.
          return psi == 0.0 && dl == 0.0 ? -rate_bound(c, x.segment<2>(px_index())) : std::numeric_limits<double>::infinity();
        }
        return psi * psi / (pb_.slot_length * c.rate_unit * dl) - rate_bound(c, x.segment<2>(px_index()));
      }
      case 5: return th - (c.psi_l * c.psi_l + 2.0 * c.psi_l * (psi - c.psi_l));
      default: return -c.psi_l * c.psi_l - 1.0 - th;
      }
    }
    const Eigen::Vector2d p = x.segment<2>(px_index());
    const double y = x(y_index());
    switch (i - 7 * users_.size()) {
    case 0: {
      double s = 0.0;
      for (std::size_t j = 0; j < users_.size(); ++j) s += x(delta_index(j));
      return s - 1.0;
    }
    case 1: {
      if (!(y > 0.0)) return std::numeric_limits<double>::infinity();
      return (c3_ / (y * y) - slack_bound(p, y)) * slack_scale_;
    }
    case 2: return -y;
    case 3: return y - y_cap_;
    case 4: return p.squaredNorm() / (r1_ * r1_) - 1.0;
    default: return (p - dest_).squaredNorm() / (r2_ * r2_) - 1.0;
    }
  }

  void constraint_gradient(std::size_t i, const VectorX & x, VectorX & g) const
  {
    g.setZero(dimension());
    const auto ip = px_index();
    if (i < 7 * users_.size()) {
      const std::size_t j = i / 7;
      const auto & c = users_[j];
      const double psi = x(psi_index(j));
      switch (i % 7) {
      case 0: g(f_index(j)) = -1.0; return;
      case 1: g(f_index(j)) = 1.0; return;
      case 2: g(delta_index(j)) = -1.0; return;
      case 3:
        g(f_index(j)) = c.quota_coef / c.demand;
        g(psi_index(j)) = 2.0 * psi / c.demand;
        return;
      case 4: {
        const double dl = x(delta_index(j));
        const double a = 1.0 / (pb_.slot_length * c.rate_unit);
        g(psi_index(j)) = 2.0 * a * psi / dl;
        g(delta_index(j)) = -a * psi * psi / (dl * dl);
        g.segment<2>(ip) = 2.0 * c.beta * (x.segment<2>(ip) - c.user);
        return;
      }
      case 5:
        g(theta_index(j)) = 1.0;
        g(psi_index(j)) = -2.0 * c.psi_l;
        return;
      default: g(theta_index(j)) = -1.0; return;
      }
    }
    const Eigen::Vector2d p = x.segment<2>(ip);
    const double y = x(y_index());
    switch (i - 7 * users_.size()) {
    case 0:
      for (std::size_t j = 0; j < users_.size(); ++j) g(delta_index(j)) = 1.0;
      return;
    case 1: {
      const double dt2 = pb_.slot_length * pb_.slot_length;
      g(y_index()) = (-2.0 * c3_ / (y * y * y) - 2.0 * y_l_) * slack_scale_;
      g.segment<2>(ip) = -(2.0 * pos_unit / dt2) * step_ * slack_scale_;
      return;
    }
    case 2: g(y_index()) = -1.0; return;
    case 3: g(y_index()) = 1.0; return;
    case 4: g.segment<2>(ip) = 2.0 * p / (r1_ * r1_); return;
    default: g.segment<2>(ip) = 2.0 * (p - dest_) / (r2_ * r2_); return;
    }
  }

  void add_constraint_hessian(std::size_t i, const VectorX & x, double s, MatrixX & H) const
  {
    const auto ip = px_index();
    if (i < 7 * users_.size()) {
      const std::size_t j = i / 7;
      const auto & c = users_[j];
      switch (i % 7) {
      case 3: H(psi_index(j), psi_index(j)) += s * 2.0 / c.demand; return;
      case 4: {
        const double dl = x(delta_index(j));
        const double psi = x(psi_index(j));
        const double a = 1.0 / (pb_.slot_length * c.rate_unit);
        const auto ipsi = psi_index(j);
        const auto idl = delta_index(j);
        H(ipsi, ipsi) += s * 2.0 * a / dl;
        H(ipsi, idl) -= s * 2.0 * a * psi / (dl * dl);
        H(idl, ipsi) -= s * 2.0 * a * psi / (dl * dl);
        H(idl, idl) += s * 2.0 * a * psi * psi / (dl * dl * dl);
        H(ip, ip) += s * 2.0 * c.beta;
        H(ip + 1, ip + 1) += s * 2.0 * c.beta;
        return;
      }
      default: return;
      }
    }
    switch (i - 7 * users_.size()) {
    case 1: {
      const double y = x(y_index());
      H(y_index(), y_index()) += s * 6.0 * c3_ / (y * y * y * y) * slack_scale_;
      return;
    }
    case 4:
      H(ip, ip) += s * 2.0 / (r1_ * r1_);
      H(ip + 1, ip + 1) += s * 2.0 / (r1_ * r1_);
      return;
    case 5:
      H(ip, ip) += s * 2.0 / (r2_ * r2_);
      H(ip + 1, ip + 1) += s * 2.0 / (r2_ * r2_);
      return;
    default: return;
    }
  }

  // --- points -------------------------------------------------------------
  /// The local point in solver variables, with theta on its tangent.
  VectorX encode_local() const
  {
    VectorX x = VectorX::Zero(dimension());
    for (std::size_t j = 0; j < users_.size(); ++j) {
      const auto k = active_[j];
      x(f_index(j)) = local_.cpu_freq[k] / freq_unit;
      x(delta_index(j)) = local_.offload_time[k] / pb_.slot_length;
      x(psi_index(j)) = users_[j].psi_l;
      x(theta_index(j)) = users_[j].psi_l * users_[j].psi_l;
    }
    x.segment<2>(px_index()) = step_ / pos_unit;
    x(y_index()) = y_l_;
    return x;
  }

  /// A strictly feasible point independent of the local point.
  const VectorX & interior_point() const { return interior_; }

  /// The first blend of the local and interior points that is strictly feasible.
  VectorX warm_start() const
  {
    const VectorX xl = encode_local();
    for (double tau = 0.05; tau < 1.0; tau *= 2.0) {
      VectorX x = (1.0 - tau) * xl + tau * interior_;
      if (strictly_feasible(*this, x)) return x;
    }
    return interior_;
  }

  SubproblemPoint decode(const VectorX & x) const
  {
    const auto K = pb_.num_users();
    SubproblemPoint s;
    s.cpu_freq.assign(K, 0.0);
    s.offload_time.assign(K, 0.0);
    s.sqrt_bits.assign(K, 0.0);
    s.theta.assign(K, 0.0);
    for (std::size_t j = 0; j < users_.size(); ++j) {
      const auto k = active_[j];
      s.cpu_freq[k] = std::clamp(x(f_index(j)) * freq_unit, 0.0, pb_.users[k].max_freq);
      s.offload_time[k] = std::max(x(delta_index(j)), 0.0) * pb_.slot_length;
      s.sqrt_bits[k] = x(psi_index(j)) * std::sqrt(bit_unit);
      s.theta[k] = x(theta_index(j)) * bit_unit;
    }
    s.position = pb_.uav_position + pos_unit * Vec2(x.segment<2>(px_index()));
    s.speed_slack = x(y_index());
    return s;
  }

private:
  struct User
  {
    double fmax = 0.0, quota_coef = 0.0, demand = 0.0, floor = 0.0;
    double rate_l = 0.0, beta = 0.0, d2l = 0.0, rate_unit = 1.0, psi_l = 0.0;
    Eigen::Vector2d user{0.0, 0.0};
    double obj_f3 = 0.0, obj_delta = 0.0, obj_f = 0.0, obj_theta = 0.0;
  };

  struct Interior
  {
    VectorX x;
    double y = 0.0;
  };

  /// Concave rate bound in units of the bandwidth (bits/s/Hz) at scaled offset p.
  static double rate_bound(const User & c, const Eigen::Vector2d & p)
  {
    return c.rate_l - c.beta * ((p - c.user).squaredNorm() - c.d2l);
  }

  /// Affine lower bound of y^2 + v^2 at scaled offset p.
  double slack_bound(const Eigen::Vector2d & p, double y) const
  {
    const double dt2 = pb_.slot_length * pb_.slot_length;
    return y_l_ * y_l_ + 2.0 * y_l_ * (y - y_l_) - step_.squaredNorm() / dt2 + (2.0 * pos_unit / dt2) * step_.dot(p);
  }

  Interior interior_point_impl() const
  {
    Interior z;
    z.x = VectorX::Zero(dimension());
    const Lens lens = kinematic_lens(pb_);
    const Eigen::Vector2d centre = (lens.center() - pb_.uav_position) / pos_unit;
    const Eigen::Vector2d local = step_ / pos_unit;
    Eigen::Vector2d p = centre;
    for (double s = 0.0; s < 1.0; s = 0.5 * (1.0 + s)) {
      p = (1.0 - s) * centre + s * local;
      bool ok = true;
      for (const auto & c : users_) ok = ok && rate_bound(c, p) > 1e-3 * c.rate_l;
      if (ok) break;
      if (s > 1.0 - 1e-6) break;
    }
    const double m = static_cast<double>(users_.size());
    for (std::size_t j = 0; j < users_.size(); ++j) {
      const auto & c = users_[j];
      const double dl = 0.5 / m;
      const double f = 0.25 * std::min(c.fmax, c.demand / c.quota_coef);
      const double cone = pb_.slot_length * c.rate_unit * dl * std::max(rate_bound(c, p), 0.0);
      const double psi = 0.5 * std::sqrt(std::min(0.5 * c.demand, cone));
      z.x(f_index(j)) = f;
      z.x(delta_index(j)) = std::max(dl, 2.0 * c.floor);
      z.x(psi_index(j)) = psi;
      z.x(theta_index(j)) = c.psi_l * c.psi_l + 2.0 * c.psi_l * (psi - c.psi_l) - 0.5;
    }
    z.x.segment<2>(px_index()) = p;
    double y = std::pow(c3_, 0.25);
    while (slack_bound(p, y) - c3_ / (y * y) < 1.0) y *= 2.0;
    z.y = y;
    return z;
  }

  PerSlotProblem pb_;
  SurrogatePoint local_;
  double weight_ = 1.0;
  std::vector<std::size_t> active_;
  std::vector<User> users_;
  double c3_ = 0.0, slack_scale_ = 1.0;
  double uav_const_ = 0.0, uav_v2_ = 0.0, uav_v3_ = 0.0, uav_y_ = 0.0;
  Vec2 step_{0.0, 0.0};
  double y_l_ = 0.0;
  Eigen::Vector2d dest_{0.0, 0.0};
  double r1_ = 0.0, r2_ = 0.0;
  double y_cap_ = 0.0;
  VectorX interior_;
};

static_assert(SmoothConvexProgram<ConvexSubproblem>);

/// Nonnegative least squares min ||A z - b|| over z >= 0 (Lawson-Hanson active set).
inline VectorX nonnegative_least_squares(const MatrixX & A, const VectorX & b, int max_iter = 500)
{
  const Eigen::Index n = A.cols();
  VectorX z = VectorX::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  auto solve_passive = [&](VectorX & out) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    out = VectorX::Zero(n);
    if (idx.empty()) return;
    MatrixX Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(static_cast<Eigen::Index>(c)) = A.col(idx[c]);
    const VectorX sol = Ap.completeOrthogonalDecomposition().solve(b);
    for (std::size_t c = 0; c < idx.size(); ++c) out(idx[c]) = sol(static_cast<Eigen::Index>(c));
  };
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max<Eigen::Index>(n, 1);
  for (int it = 0; it < max_iter; ++it) {
    const VectorX w = A.transpose() * (b - A * z);
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w(i) > wmax) {
        wmax = w(i);
        best = i;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < max_iter; ++inner) {
      VectorX s;
      solve_passive(s);
      bool positive = true;
      for (Eigen::Index i = 0; i < n; ++i)
        if (passive[static_cast<std::size_t>(i)] && s(i) <= 0.0) positive = false;
      if (positive) {
        z = s;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && s(i) <= 0.0) alpha = std::min(alpha, z(i) / (z(i) - s(i)));
      }
      z += alpha * (s - z);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z(i) <= tol) {
          passive[static_cast<std::size_t>(i)] = false;
          z(i) = 0.0;
        }
      }
    }
  }
  return z;
}

/**
 * @brief Stationarity residual of the KKT system at `x`.
 *
 * Multipliers of the constraints within `active_tol` of their bound are fitted
 * by nonnegative least squares; the remaining residual is divided by
 * max(1, ||grad f||).
 */
template<SmoothConvexProgram P>
double kkt_residual(const P & prog, const VectorX & x, double active_tol = 1e-6)
{
  const Eigen::Index n = prog.dimension();
  VectorX grad(n), gi(n);
  MatrixX H(n, n);
  prog.objective_derivatives(x, grad, H);
  std::vector<VectorX> cols;
  for (std::size_t i = 0; i < prog.num_constraints(); ++i) {
    if (prog.constraint(i, x) >= -active_tol) {
      prog.constraint_gradient(i, x, gi);
      cols.push_back(gi);
    }
  }
  double residual = grad.norm();
  if (!cols.empty()) {
    MatrixX J(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) J.col(static_cast<Eigen::Index>(c)) = cols[c];
    const VectorX lam = nonnegative_least_squares(J, -grad);
    residual = (grad + J * lam).norm();
  }
  return residual / std::max(1.0, grad.norm());
}

/// Barrier solve; a finished solve whose central-path duals miss the tolerance is certified by the fitted multipliers.
inline SolverReport solve_p3(const ConvexSubproblem & sub, const VectorX & start, const BarrierOptions & opt = {})
{
  SolverReport rep = solve_barrier(sub, start, opt);
  if (rep.status == SolverStatus::MaxIterations && rep.gap <= 10.0 * opt.gap_tolerance * std::max(1.0, std::abs(rep.objective))) {
    rep.stationarity = std::min(rep.stationarity, kkt_residual(sub, rep.primal));
    if (rep.stationarity <= opt.stationarity_tolerance) rep.status = SolverStatus::Converged;
  }
  return rep;
}

inline SolverReport solve_p3(const ConvexSubproblem & sub, const BarrierOptions & opt = {})
{
  return solve_p3(sub, sub.warm_start(), opt);
}

/**
 * @brief Exact optimum of the per-slot problem over (f, delta) at a fixed UAV position.
 *
 * With a multiplier lambda on the TDMA budget each user decouples. Users whose
 * offloading cost per second V w P + lambda - u R is negative fill their quota
 * by offloading with the local frequency at its stationary point; the others
 * compute locally only. lambda is found by bisection and users at the
 * breakpoint share the remaining time.
 */
inline SlotDecision solve_fixed_position(const PerSlotProblem & pb, const Vec2 & p)
{
  const auto K = pb.num_users();
  const double dt = pb.slot_length;
  std::vector<double> rate(K), value(K), vw(K);
  for (std::size_t k = 0; k < K; ++k) {
    rate[k] = pb.rate(k, p);
    value[k] = pb.bit_value(k);
    vw[k] = pb.tradeoff * pb.users[k].weight;
  }
  auto local_cap = [&](std::size_t k) {
    const auto & u = pb.users[k];
    return std::min(u.max_freq, u.demand * u.cycles_per_bit / dt);
  };
  // Stationary point of c3 f^3 - c1 f with c3 = V w gamma_c Delta, c1 = numerator / (C) Delta.
  auto stationary = [&](std::size_t k, double numerator) {
    const auto & u = pb.users[k];
    const double denom = 3.0 * vw[k] * pb.capacitance * u.cycles_per_bit;
    if (numerator <= 0.0) return 0.0;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(numerator / denom);
  };
  auto offload_cost = [&](std::size_t k, double lambda) {
    return vw[k] * pb.users[k].transmit_power + lambda - value[k] * rate[k];
  };
  auto offloading = [&](std::size_t k, double lambda) {
    return pb.users[k].demand > 0.0 && rate[k] > 0.0 && offload_cost(k, lambda) < 0.0;
  };
  std::vector<double> f(K, 0.0), delta(K, 0.0);
  auto assign = [&](double lambda) {
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto & u = pb.users[k];
      if (u.demand <= 0.0) {
        f[k] = 0.0;
        delta[k] = 0.0;
        continue;
      }
      if (offloading(k, lambda)) {
        const double num = (vw[k] * u.transmit_power + lambda) / rate[k];
        f[k] = std::min(local_cap(k), stationary(k, num));
        delta[k] = std::max(u.demand - f[k] * dt / u.cycles_per_bit, 0.0) / rate[k];
      } else {
        f[k] = std::min(local_cap(k), stationary(k, value[k]));
        delta[k] = 0.0;
      }
      total += delta[k];
    }
    return total;
  };

  if (assign(0.0) > dt) {
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t k = 0; k < K; ++k) hi = std::max(hi, -offload_cost(k, 0.0));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (assign(mid) > dt ? lo : hi) = mid;
    }
    double residual = dt - assign(hi);
    for (std::size_t k = 0; k < K && residual > 0.0; ++k) {
      if (!offloading(k, lo) || offloading(k, hi)) continue;
      // Marginal user: indifferent to offloading at the breakpoint price.
      const auto & u = pb.users[k];
      const double f_free = std::min(local_cap(k), stationary(k, value[k]));
      const double want = std::max(u.demand - f_free * dt / u.cycles_per_bit, 0.0) / rate[k];
      delta[k] = std::min(residual, want);
      residual -= delta[k];
      f[k] = std::min(f_free, std::max(u.demand - delta[k] * rate[k], 0.0) * u.cycles_per_bit / dt);
    }
  }
  double used = 0.0;
  for (double d : delta) used += d;
  if (used > dt) {
    for (double & d : delta) d *= dt / used;
  }
  return finalize_decision(pb, f, delta, p);
}

}  // namespace uavmec

#endif  // UAVMEC__SOLVER_HPP_
