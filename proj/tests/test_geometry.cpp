#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace uavmec;
using fixtures::uniform;

TEST(Geometry, DiskProjection)
{
  const Disk d{Vec2(1.0, 1.0), 2.0};
  EXPECT_EQ(d.project(Vec2(1.5, 1.0)), Vec2(1.5, 1.0));
  EXPECT_TRUE(d.project(Vec2(1.0, 7.0)).isApprox(Vec2(1.0, 3.0)));
  EXPECT_TRUE(d.contains(Vec2(3.0, 1.0)));
  EXPECT_FALSE(d.contains(Vec2(3.1, 1.0)));
}

TEST(Geometry, LensInterval)
{
  const Lens lens{{Vec2(0.0, 0.0), 25.0}, {Vec2(100.0, 0.0), 90.0}};
  const auto [lo, hi] = lens.axis_interval();
  EXPECT_DOUBLE_EQ(lo, 10.0);
  EXPECT_DOUBLE_EQ(hi, 25.0);
  EXPECT_TRUE(lens.center().isApprox(Vec2(17.5, 0.0)));
  EXPECT_FALSE(lens.degenerate());
  const Lens point{{Vec2(0.0, 0.0), 25.0}, {Vec2(25.0, 0.0), 0.0}};
  EXPECT_TRUE(point.degenerate());
  EXPECT_TRUE(point.center().isApprox(Vec2(25.0, 0.0)));
}

TEST(Geometry, LensProjectionIsNearestFeasiblePoint)
{
  Rng rng = make_stream(31, Stream::Testing);
  for (int i = 0; i < 300; ++i) {
    const Lens lens{{Vec2(0.0, 0.0), 25.0}, {Vec2(uniform(rng, 10, 80), uniform(rng, -20, 20)), uniform(rng, 40, 90)}};
    if (lens.degenerate()) continue;
    const Vec2 p(uniform(rng, -60, 60), uniform(rng, -60, 60));
    const Vec2 q = lens.project(p);
    ASSERT_TRUE(lens.contains(q, 1e-9));
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 400; ++a) {
      for (int r = 0; r <= 40; ++r) {
        const double th = 2.0 * std::numbers::pi * a / 400.0;
        const Vec2 z = 25.0 * (r / 40.0) * Vec2(std::cos(th), std::sin(th));
        if (lens.contains(z)) best = std::min(best, (z - p).norm());
      }
    }
    EXPECT_LE((q - p).norm(), best + 1e-9);
  }
}
