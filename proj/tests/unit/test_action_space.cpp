#include <doctest.h>

#include <random>

#include "spinopt/action_space.hpp"
#include "spinopt/errors.hpp"

using namespace spinopt;

TEST_CASE("denormalize maps the initialization vector through the servo scales") {
  const ScalingConfig c;
  const PhysicalAction p = denormalize(initial_action(), c);
  const ServoVector expected{0.0, 0.0, 35.0, 70.0, 17.5, 45.0};
  for (std::size_t i = 0; i < kServoCount; ++i) CHECK(p.servo_deltas_deg[i] == expected[i]);
  CHECK(p.delay_s == 0.7);
  CHECK(p.grasp_offset_m == 0.0);
}

TEST_CASE("delay endpoints land exactly on 0.5 s and 0.9 s") {
  const ScalingConfig c;
  ActionParams a;
  a.delay = -1.0;
  CHECK(denormalize(a, c).delay_s == 0.5);
  a.delay = 1.0;
  CHECK(denormalize(a, c).delay_s == 0.9);
  a.delay = 0.0;
  CHECK(denormalize(a, c).delay_s == 0.7);
}

TEST_CASE("normalize inverts the worked examples") {
  const ScalingConfig c;
  PhysicalAction p;
  p.servo_deltas_deg = {0.0, 0.0, 35.0, 70.0, 17.5, 45.0};
  p.delay_s = 0.7;
  p.grasp_offset_m = 0.05;
  const ActionParams a = normalize(p, c);
  const ServoVector expected{0.0, 0.0, 0.5, 1.0, 0.5, 1.0};
  for (std::size_t i = 0; i < kServoCount; ++i) CHECK(a.servo[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(a.delay == doctest::Approx(0.0));
  CHECK(a.grasp == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normalize rejects physical values outside the scaled box") {
  const ScalingConfig c;
  PhysicalAction p;
  p.delay_s = 0.95;
  try {
    normalize(p, c);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(e.component() == "delay_s");
  }
  p.delay_s = 0.7;
  p.servo_deltas_deg[2] = 71.0;
  try {
    normalize(p, c);
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(e.component() == "servo_deltas_deg[2]");
  }
}

TEST_CASE("denormalize names the offending component") {
  ActionParams a;
  a.grasp = 1.5;
  try {
    denormalize(a, ScalingConfig{});
    FAIL("expected BoundsError");
  } catch (const BoundsError& e) {
    CHECK(e.component() == "g");
  }
}

TEST_CASE("catch action negates the m1 deltas") {
  PhysicalAction p;
  p.servo_deltas_deg = {10.0, -20.0, 5.0, 5.0, 5.0, 5.0};
  CHECK(catch_action(p).m1_deltas_deg == std::array<double, 2>{-10.0, 20.0});
  p.servo_deltas_deg[0] = 0.0;
  p.servo_deltas_deg[1] = 0.0;
  const auto zero = catch_action(p).m1_deltas_deg;
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  p.servo_deltas_deg[0] = -30.0;
  p.servo_deltas_deg[1] = 35.0;
  CHECK(catch_action(p).m1_deltas_deg == std::array<double, 2>{30.0, -35.0});
}

TEST_CASE("clamp_to_bounds projects onto the box") {
  const std::array<double, 8> raw{1.7, -2.0, 0, 0, 0, 0, 0.5, -0.3};
  const ActionVector v = clamp_to_bounds(raw).to_vector();
  const ActionVector expected{1.0, -1.0, 0, 0, 0, 0, 0.5, -0.3};
  CHECK(v == expected);

  const std::array<double, 8> inside{0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7, -0.8};
  const ActionVector same = clamp_to_bounds(inside).to_vector();
  for (std::size_t i = 0; i < kActionDim; ++i) CHECK(same[i] == inside[i]);

  CHECK_THROWS_AS(clamp_to_bounds(std::array<double, 3>{0, 0, 0}), ContractError);
}

TEST_CASE("clamp is idempotent and the nearest box point (property)") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 8> v{};
    for (double& x : v) x = u(rng);
    const ActionVector once = clamp_to_bounds(v).to_vector();
    const ActionVector twice = clamp_to_bounds(once).to_vector();
    CHECK(once == twice);
    for (std::size_t i = 0; i < kActionDim; ++i) {
      // Per-coordinate distance to the box is exactly what clamping removes.
      const double excess = std::max({0.0, v[i] - 1.0, -1.0 - v[i]});
      CHECK(std::abs(v[i] - once[i]) == doctest::Approx(excess));
    }
  }
}

TEST_CASE("normalize after denormalize is the identity on the box (property)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ScalingConfig c;
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 8> v{};
    for (double& x : v) x = u(rng);
    const ActionParams a = ActionParams::from_vector(v);
    const ActionVector back = normalize(denormalize(a, c), c).to_vector();
    for (std::size_t i = 0; i < kActionDim; ++i) CHECK(std::abs(back[i] - v[i]) < 1e-12);
  }
}

TEST_CASE("denormalize is strictly increasing in every component (property)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 0.99);
  std::uniform_real_distribution<double> step(1e-6, 0.01);
  const ScalingConfig c;
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 8> v{};
    for (double& x : v) x = u(rng);
    for (std::size_t k = 0; k < kActionDim; ++k) {
      std::array<double, 8> w = v;
      w[k] += step(rng);
      const PhysicalAction lo = denormalize(ActionParams::from_vector(v), c);
      const PhysicalAction hi = denormalize(ActionParams::from_vector(w), c);
      if (k < kServoCount) CHECK(hi.servo_deltas_deg[k] > lo.servo_deltas_deg[k]);
      if (k == 6) CHECK(hi.delay_s > lo.delay_s);
      if (k == 7) CHECK(hi.grasp_offset_m > lo.grasp_offset_m);
    }
  }
}

TEST_CASE("default scaling keeps every delay inside [0.5, 0.9] s") {
  const ScalingConfig c;
  for (int i = 0; i <= 200; ++i) {
    ActionParams a;
    a.delay = -1.0 + i * 0.01;
    if (a.delay > 1.0) a.delay = 1.0;
    const double d = denormalize(a, c).delay_s;
    CHECK(d >= 0.5);
    CHECK(d <= 0.9);
  }
}

TEST_CASE("scaling validation") {
  ScalingConfig c;
  c.servo_scales_deg[3] = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScalingConfig{};
  c.delay_gain = 0.8;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScalingConfig{};
  c.delay_gain = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("from_vector rejects out-of-box components") {
  std::array<double, 8> v{};
  v[6] = -1.0001;
  CHECK_THROWS_AS(ActionParams::from_vector(v), BoundsError);
}
