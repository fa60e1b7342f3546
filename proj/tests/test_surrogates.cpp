#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace uavmec;
using fixtures::uniform;

namespace {

constexpr int kSamples = 1000;
constexpr double kTangency = 1e-9;

UserSlot random_user(Rng & rng, const Vec2 & uav)
{
  ScenarioConfig c;
  c.los_a = uniform(rng, 4.0, 28.0);
  c.los_b = uniform(rng, 0.05, 0.4);
  c.pathloss_exponent = uniform(rng, 2.0, 3.5);
  UserSlot u;
  u.position = Vec2(uniform(rng, -400, 400), uniform(rng, -400, 400));
  u.channel = channel_params(c, 0);
  u.snr = snr_coefficient(uav, u.position, u.channel);
  return u;
}

}  // namespace

TEST(Surrogates, RateLowerBoundWithTangency)
{
  Rng rng = make_stream(21, Stream::Testing);
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 uav(uniform(rng, -300, 300), uniform(rng, -300, 300));
    const auto u = random_user(rng, uav);
    const Vec2 pl = uav + Vec2(uniform(rng, -25, 25), uniform(rng, -25, 25));
    const Vec2 p = uav + Vec2(uniform(rng, -25, 25), uniform(rng, -25, 25));
    const double exact_l = rate_from_snr(u.snr, (pl - u.position).squaredNorm(), u.channel);
    EXPECT_NEAR(rate_surrogate(u, pl, pl), exact_l, kTangency);
    EXPECT_LE(rate_surrogate(u, p, pl), rate_from_snr(u.snr, (p - u.position).squaredNorm(), u.channel));
    EXPECT_GT(rate_slope(u.snr, (pl - u.position).squaredNorm(), u.channel), 0.0);
  }
}

TEST(Surrogates, RateLowerBoundFarFromLocalPoint)
{
  Rng rng = make_stream(22, Stream::Testing);
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 uav(0.0, 0.0);
    const auto u = random_user(rng, uav);
    const Vec2 pl(uniform(rng, -1000, 1000), uniform(rng, -1000, 1000));
    const Vec2 p(uniform(rng, -1000, 1000), uniform(rng, -1000, 1000));
    EXPECT_LE(rate_surrogate(u, p, pl), rate_from_snr(u.snr, (p - u.position).squaredNorm(), u.channel) + 1e-9);
  }
}

TEST(Surrogates, SpeedSlackAtLocalPoint)
{
  const double c3 = 263.4;
  EXPECT_NEAR(y_local(Vec2(5.0, 5.0), Vec2(5.0, 5.0), 1.0, c3), 4.0286, 1e-4);
  double prev = std::numeric_limits<double>::infinity();
  for (double v = 0.0; v <= 40.0; v += 0.25) {
    const double y = y_local(Vec2(v, 0.0), Vec2(0.0, 0.0), 1.0, c3);
    EXPECT_NEAR(y * y + v * v / 2.0, std::sqrt(c3 + std::pow(v, 4) / 4.0), 1e-12 * (1.0 + v * v));
    EXPECT_NEAR(std::pow(y, 4) + y * y * v * v, c3, 1e-9 * c3);
    EXPECT_LT(y, prev);
    prev = y;
  }
}

TEST(Surrogates, SpeedSlackLowerBoundWithTangency)
{
  Rng rng = make_stream(23, Stream::Testing);
  for (int i = 0; i < kSamples; ++i) {
    const double dt = uniform(rng, 0.5, 2.0);
    const Vec2 pu(uniform(rng, -300, 300), uniform(rng, -300, 300));
    const Vec2 pl = pu + Vec2(uniform(rng, -25, 25), uniform(rng, -25, 25));
    const double yl = y_local(pl, pu, dt, 263.4);
    const double exact_l = yl * yl + (pl - pu).squaredNorm() / (dt * dt);
    EXPECT_NEAR(y_surrogate(pl, yl, pl, yl, pu, dt), exact_l, kTangency * std::max(1.0, exact_l));
    const Vec2 p = pu + Vec2(uniform(rng, -50, 50), uniform(rng, -50, 50));
    const double y = uniform(rng, 0.0, 10.0);
    EXPECT_LE(y_surrogate(p, y, pl, yl, pu, dt), y * y + (p - pu).squaredNorm() / (dt * dt) + 1e-12);
  }
}

TEST(Surrogates, SpeedSlackAtHoverIsPureTangent)
{
  const Vec2 pu(1.0, 2.0);
  const double yl = y_local(pu, pu, 1.0, 263.4);
  for (double y : {0.0, 1.0, 3.0, 7.0}) {
    EXPECT_NEAR(y_surrogate(pu, y, pu, yl, pu, 1.0), yl * yl + 2.0 * yl * (y - yl), 1e-12);
  }
}

TEST(Surrogates, SquareTangentLowerBound)
{
  Rng rng = make_stream(24, Stream::Testing);
  for (int i = 0; i < kSamples; ++i) {
    const double psi_l = uniform(rng, 0.0, 3000.0);
    const double psi = uniform(rng, 0.0, 3000.0);
    EXPECT_NEAR(theta_surrogate(psi_l, psi_l), psi_l * psi_l, kTangency * std::max(1.0, psi_l * psi_l));
    EXPECT_LE(theta_surrogate(psi, psi_l), psi * psi);
  }
  EXPECT_EQ(theta_surrogate(0.0, 5.0), -25.0);
}

TEST(Surrogates, RateConeImpliesTrueRateConstraint)
{
  // psi^2 <= delta R^l(p) keeps the offloaded bits below delta R(p).
  Rng rng = make_stream(25, Stream::Testing);
  for (int i = 0; i < kSamples; ++i) {
    const Vec2 uav(0.0, 0.0);
    const auto u = random_user(rng, uav);
    const Vec2 pl = Vec2(uniform(rng, -25, 25), uniform(rng, -25, 25));
    const Vec2 p = Vec2(uniform(rng, -25, 25), uniform(rng, -25, 25));
    const double delta = uniform(rng, 1e-6, 1.0);
    const double bound = std::max(rate_surrogate(u, p, pl), 0.0);
    const double psi = std::sqrt(delta * bound) * uniform(rng, 0.0, 1.0);
    EXPECT_LE(psi * psi, delta * rate_from_snr(u.snr, (p - u.position).squaredNorm(), u.channel) * (1 + 1e-15));
    const double psi_at_l = std::sqrt(delta * rate_from_snr(u.snr, (pl - u.position).squaredNorm(), u.channel));
    EXPECT_NEAR(psi_at_l * psi_at_l, delta * rate_surrogate(u, pl, pl), kTangency * std::max(1.0, psi_at_l * psi_at_l));
  }
}

TEST(Surrogates, SqrtBitsAtLocalPoint)
{
  EXPECT_EQ(psi_local(0.0, 4e6), 0.0);
  EXPECT_DOUBLE_EQ(psi_local(0.25, 4e6), 1000.0);
  EXPECT_DOUBLE_EQ(psi_local(0.3, 5e6) * psi_local(0.3, 5e6) / 0.3, 5e6);
}
