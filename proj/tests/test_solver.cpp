#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace uavmec;
using fixtures::uniform;

namespace {

ConvexSubproblem subproblem_at_start(const PerSlotProblem & pb)
{
  return ConvexSubproblem(pb, surrogate_point(pb, solve_fixed_position(pb, pursuit_position(pb))));
}

/// Random point of the subproblem's feasible set, by rejection around the interior point.
bool random_feasible(const ConvexSubproblem & sub, Rng & rng, VectorX & x)
{
  const VectorX & z = sub.interior_point();
  for (int attempt = 0; attempt < 2000; ++attempt) {
    x = z;
    const double spread = uniform(rng, 0.0, 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += spread * uniform(rng, -1.0, 1.0) * std::max(0.2, std::abs(z(i)));
    if (strictly_feasible(sub, x)) return true;
  }
  return false;
}

PerSlotProblem single_user(double demand, double power, double weight = 0.25, double qu = 0.0)
{
  ScenarioConfig c;
  c.num_users = 1;
  c.user_start = {Vec2(100.0, 0.0)};
  c.transmit_power = {power};
  c.arrival_prob = {0.8};
  c.task_bits = {2.2e6};
  c.cycles_per_bit = {1000.0};
  c.max_cpu_freq = {1e9};
  c.energy_weight = {weight};
  const QueueState q{{demand}, qu};
  return assemble_per_slot(q, {0.0}, Vec2(100.0, 0.0), c.user_start, c, 10);
}

}  // namespace

TEST(Subproblem, LayoutCountsActiveUsers)
{
  Rng rng = make_stream(41, Stream::Testing);
  auto pb = fixtures::random_problem(rng);
  pb.users[2].demand = 0.0;
  const auto sub = subproblem_at_start(pb);
  EXPECT_EQ(sub.num_active(), 3u);
  EXPECT_EQ(sub.dimension(), 15);
  EXPECT_EQ(sub.num_constraints(), 27u);
  EXPECT_TRUE(strictly_feasible(sub, sub.interior_point()));
  EXPECT_TRUE(strictly_feasible(sub, sub.warm_start()));
}

TEST(Subproblem, DerivativesMatchFiniteDifferences)
{
  Rng rng = make_stream(42, Stream::Testing);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    VectorX x;
    ASSERT_TRUE(random_feasible(sub, rng, x));
    const Eigen::Index n = sub.dimension();
    const double h = 1e-6;
    VectorX g(n), gp(n), gm(n);
    MatrixX H(n, n), Hs(n, n);
    sub.objective_derivatives(x, g, H);
    for (Eigen::Index i = 0; i < n; ++i) {
      VectorX xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (sub.objective(xp) - sub.objective(xm)) / (2 * h);
      EXPECT_NEAR(g(i), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      MatrixX dummy(n, n);
      sub.objective_derivatives(xp, gp, dummy);
      sub.objective_derivatives(xm, gm, dummy);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double fd2 = (gp(j) - gm(j)) / (2 * h);
        EXPECT_NEAR(H(j, i), fd2, 1e-4 * std::max(1.0, std::abs(fd2)));
      }
    }
    for (std::size_t c = 0; c < sub.num_constraints(); ++c) {
      sub.constraint_gradient(c, x, g);
      Hs.setZero(n, n);
      sub.add_constraint_hessian(c, x, 1.0, Hs);
      for (Eigen::Index i = 0; i < n; ++i) {
        VectorX xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (sub.constraint(c, xp) - sub.constraint(c, xm)) / (2 * h);
        EXPECT_NEAR(g(i), fd, 1e-5 * std::max(1.0, std::abs(fd))) << "constraint " << c << " var " << i;
        sub.constraint_gradient(c, xp, gp);
        sub.constraint_gradient(c, xm, gm);
        for (Eigen::Index j = 0; j < n; ++j) {
          const double fd2 = (gp(j) - gm(j)) / (2 * h);
          EXPECT_NEAR(Hs(j, i), fd2, 1e-4 * std::max(1.0, std::abs(fd2))) << "constraint " << c;
        }
      }
    }
  }
}

TEST(Subproblem, ConvexityAudit)
{
  Rng rng = make_stream(43, Stream::Testing);
  int pairs = 0;
  while (pairs < 1000) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    for (int i = 0; i < 50; ++i, ++pairs) {
      VectorX x, z;
      ASSERT_TRUE(random_feasible(sub, rng, x));
      ASSERT_TRUE(random_feasible(sub, rng, z));
      const double lam = uniform(rng, 0.0, 1.0);
      const VectorX m = lam * x + (1.0 - lam) * z;
      EXPECT_LE(sub.objective(m), lam * sub.objective(x) + (1 - lam) * sub.objective(z) + 1e-9);
      for (std::size_t c = 0; c < sub.num_constraints(); ++c) {
        EXPECT_LE(sub.constraint(c, m), lam * sub.constraint(c, x) + (1 - lam) * sub.constraint(c, z) + 1e-9)
            << "constraint " << c;
      }
    }
  }
}

TEST(Subproblem, LocalPointIsFeasibleForSurrogates)
{
  Rng rng = make_stream(44, Stream::Testing);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    EXPECT_LE(max_constraint(sub, sub.encode_local()), 1e-9);
  }
}

TEST(SolveP3, ConvergedReportsMeetTolerances)
{
  Rng rng = make_stream(45, Stream::Testing);
  int converged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    const auto rep = solve_p3(sub);
    ASSERT_NE(rep.status, SolverStatus::InfeasibleStart);
    ASSERT_NE(rep.status, SolverStatus::LostFeasibility);
    if (!rep.converged()) continue;
    ++converged;
    EXPECT_LE(rep.max_violation, 1e-6);
    EXPECT_LE(rep.stationarity, 1e-5);
    EXPECT_LE(kkt_residual(sub, rep.primal), 1e-4);
  }
  EXPECT_GE(converged, 48);
}

TEST(SolveP3, BeatsRandomFeasiblePoints)
{
  Rng rng = make_stream(46, Stream::Testing);
  int samples = 0;
  while (samples < 1000) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    const auto rep = solve_p3(sub);
    const double scale = std::max(1.0, std::abs(rep.objective));
    for (int i = 0; i < 100; ++i, ++samples) {
      VectorX x;
      ASSERT_TRUE(random_feasible(sub, rng, x));
      EXPECT_LE(rep.objective, sub.objective(x) + 1e-6 * scale);
    }
  }
}

TEST(SolveP3, WarmStartMatchesColdStart)
{
  Rng rng = make_stream(47, Stream::Testing);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    const auto warm = solve_p3(sub);
    const auto cold = solve_p3(sub, sub.interior_point());
    EXPECT_LE(warm.objective, cold.objective + 1e-6 * std::max(1.0, std::abs(cold.objective)));
  }
}

TEST(SolveP3, ObjectiveScalingKeepsSolution)
{
  Rng rng = make_stream(48, Stream::Testing);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto local = surrogate_point(pb, solve_fixed_position(pb, pursuit_position(pb)));
    const ConvexSubproblem a(pb, local);
    const ConvexSubproblem b(pb, local, 7.0);
    const auto ra = solve_p3(a);
    const auto rb = solve_p3(b);
    EXPECT_NEAR(rb.objective, 7.0 * ra.objective, 1e-6 * std::max(1.0, std::abs(rb.objective)));
    const auto da = a.decode(ra.primal);
    const auto db = b.decode(rb.primal);
    EXPECT_LE((da.position - db.position).norm(), 1e-3);
    for (std::size_t k = 0; k < pb.num_users(); ++k) {
      EXPECT_NEAR(da.cpu_freq[k], db.cpu_freq[k], 1e-3 * pb.users[k].max_freq);
      EXPECT_NEAR(da.offload_time[k], db.offload_time[k], 1e-3);
    }
  }
}

TEST(SolveP3, Deterministic)
{
  Rng rng = make_stream(49, Stream::Testing);
  const auto pb = fixtures::random_problem(rng);
  const auto sub = subproblem_at_start(pb);
  const auto a = solve_p3(sub);
  const auto b = solve_p3(sub);
  EXPECT_EQ(a.primal, b.primal);
}

TEST(SolveP3, NoDemandNoEnergyPrice)
{
  Rng rng = make_stream(50, Stream::Testing);
  auto pb = fixtures::random_problem(rng);
  for (auto & u : pb.users) u.demand = 0.0;
  pb.energy_backlog = 0.0;
  const auto sub = subproblem_at_start(pb);
  EXPECT_EQ(sub.num_active(), 0u);
  const auto rep = solve_p3(sub);
  EXPECT_EQ(rep.objective, 0.0);
  const auto sp = sub.decode(rep.primal);
  for (std::size_t k = 0; k < pb.num_users(); ++k) {
    EXPECT_EQ(sp.cpu_freq[k], 0.0);
    EXPECT_EQ(sp.sqrt_bits[k], 0.0);
  }
}

TEST(KktResidual, HoverOptimumWithoutDemand)
{
  // With no demand and a priced UAV the optimum hovers with the slack at C3^(1/4).
  Rng rng = make_stream(51, Stream::Testing);
  auto pb = fixtures::random_problem(rng);
  for (auto & u : pb.users) u.demand = 0.0;
  pb.energy_backlog = 10.0;
  SurrogatePoint local = surrogate_point(pb, initial_decision(pb, pb.uav_position));
  const ConvexSubproblem sub(pb, local);
  VectorX x = VectorX::Zero(sub.dimension());
  x(sub.y_index()) = std::pow(pb.propulsion.hover_velocity4, 0.25);
  EXPECT_LE(kkt_residual(sub, x), 1e-8);
  const auto rep = solve_p3(sub);
  EXPECT_NEAR(rep.primal(sub.y_index()), x(sub.y_index()), 1e-6);
  EXPECT_LE(rep.primal.segment<2>(sub.px_index()).norm(), 1e-6);
}

TEST(KktResidual, PerturbedFrequencyIsWorse)
{
  Rng rng = make_stream(52, Stream::Testing);
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 10; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const auto sub = subproblem_at_start(pb);
    const auto rep = solve_p3(sub);
    for (std::size_t j = 0; j < sub.num_active(); ++j) {
      VectorX x = rep.primal;
      if (x(sub.f_index(j)) < 1e-3) continue;
      x(sub.f_index(j)) *= 1.01;
      if (max_constraint(sub, x) > 0.0) continue;
      EXPECT_GT(kkt_residual(sub, x), kkt_residual(sub, rep.primal));
      ++checked;
      break;
    }
  }
  EXPECT_GE(checked, 5);
}

TEST(KktResidual, GridWinnerComparableToSolver)
{
  Rng rng = make_stream(53, Stream::Testing);
  const auto pb = fixtures::random_problem(rng, 1);
  const auto r = solve_p2(pb);
  const auto grid = fixtures::grid_search_one_user(pb, 21, 21, 11);
  EXPECT_LE(r.objective, grid.objective + 0.01 * std::abs(grid.objective));
  const ConvexSubproblem at_grid(pb, surrogate_point(pb, grid.decision));
  const ConvexSubproblem at_sca(pb, surrogate_point(pb, r.decision));
  EXPECT_LE(kkt_residual(at_sca, solve_p3(at_sca).primal), kkt_residual(at_grid, at_grid.encode_local()) + 1e-6);
}

TEST(NonnegativeLeastSquares, SmallInstances)
{
  MatrixX A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  const VectorX z = nonnegative_least_squares(A, Eigen::Vector3d(1.0, -1.0, 0.0));
  EXPECT_GE(z.minCoeff(), 0.0);
  EXPECT_NEAR(z(1), 0.0, 1e-12);
  EXPECT_NEAR(z(0), 0.5, 1e-12);
  const VectorX exact = nonnegative_least_squares(A, Eigen::Vector3d(2.0, 3.0, 5.0));
  EXPECT_NEAR(exact(0), 2.0, 1e-12);
  EXPECT_NEAR(exact(1), 3.0, 1e-12);
}

TEST(FixedPosition, NoDemandGivesZeros)
{
  Rng rng = make_stream(54, Stream::Testing);
  auto pb = fixtures::random_problem(rng);
  for (auto & u : pb.users) u.demand = 0.0;
  const auto d = solve_fixed_position(pb, pb.uav_position);
  for (std::size_t k = 0; k < pb.num_users(); ++k) {
    EXPECT_EQ(d.cpu_freq[k], 0.0);
    EXPECT_EQ(d.offload_time[k], 0.0);
  }
}

TEST(FixedPosition, SingleUserStationaryFrequency)
{
  // Transmission too expensive to pay off, demand large enough that the quota is slack.
  for (double demand : {2e5, 1e6, 4e6, 2e7}) {
    const auto pb = single_user(demand, 1e3);
    const auto d = solve_fixed_position(pb, pb.uav_position);
    const auto & u = pb.users[0];
    const double formula = std::min(u.max_freq, std::sqrt(pb.bit_value(0) / (3 * pb.tradeoff * u.weight * pb.capacitance * u.cycles_per_bit)));
    const double cap = std::min(formula, u.demand * u.cycles_per_bit / pb.slot_length);
    EXPECT_NEAR(d.cpu_freq[0], cap, 1e-9 * cap);
    EXPECT_EQ(d.offload_time[0], 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i) {
      const SlotDecision g = finalize_decision(pb, {u.max_freq * i / 20000.0}, {0.0}, pb.uav_position);
      best = std::min(best, objective_value(pb, g));
    }
    const double mine = objective_value(pb, d);
    EXPECT_LE(mine, best + 0.005 * std::abs(best));
  }
}

TEST(FixedPosition, TwoUsersLinearProgramVertex)
{
  ScenarioConfig c;
  c.num_users = 2;
  c.user_start = {Vec2(0.0, 0.0), Vec2(150.0, 0.0)};
  for (auto * v : {&c.transmit_power, &c.arrival_prob, &c.task_bits, &c.cycles_per_bit, &c.max_cpu_freq, &c.energy_weight}) v->resize(2, v->front());
  c.max_cpu_freq = {1e3, 1e3};
  const QueueState q{{3e7, 2e7}, 0.0};
  const auto pb = assemble_per_slot(q, {0.0, 0.0}, Vec2(0.0, 0.0), c.user_start, c, 10);
  const double m1 = pb.bit_value(0) * pb.rate(0, pb.uav_position) - pb.tradeoff * pb.users[0].weight * pb.users[0].transmit_power;
  const double m2 = pb.bit_value(1) * pb.rate(1, pb.uav_position) - pb.tradeoff * pb.users[1].weight * pb.users[1].transmit_power;
  ASSERT_GT(m1, m2);
  ASSERT_GT(m2, 0.0);
  const auto d = solve_fixed_position(pb, pb.uav_position);
  EXPECT_NEAR(d.offload_time[0], pb.slot_length, 1e-9);
  EXPECT_NEAR(d.offload_time[1], 0.0, 1e-9);
  double best = std::numeric_limits<double>::infinity();
  const std::vector<std::vector<double>> vertices{{0.0, 0.0}, {pb.slot_length, 0.0}, {0.0, pb.slot_length}};
  for (const auto & v : vertices) best = std::min(best, objective_value(pb, finalize_decision(pb, d.cpu_freq, v, pb.uav_position)));
  EXPECT_LE(objective_value(pb, d), best + 0.005 * std::abs(best));
}

TEST(FixedPosition, BeatsRandomAllocations)
{
  Rng rng = make_stream(55, Stream::Testing);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pb = fixtures::random_problem(rng);
    const Vec2 p = pursuit_position(pb);
    const auto d = solve_fixed_position(pb, p);
    ASSERT_TRUE(fixtures::feasible(pb, d));
    const double mine = objective_value(pb, d);
    for (int s = 0; s < 50; ++s) {
      std::vector<double> f(pb.num_users()), delta(pb.num_users());
      double total = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = uniform(rng, 0.0, pb.users[k].max_freq);
        delta[k] = uniform(rng, 0.0, 1.0);
        total += delta[k];
      }
      const double share = uniform(rng, 0.0, pb.slot_length) / total;
      for (auto & x : delta) x *= share;
      EXPECT_LE(mine, objective_value(pb, finalize_decision(pb, f, delta, p)) + 1e-9 * std::abs(mine));
    }
  }
}
