#include <cmath>

#include "doctest.h"
#include "glassflow/params.hpp"

TEST_CASE("safe rotation speed follows the friction bound") {
  gf::PhysicalParams p;
  p.static_friction = 0.6;
  p.gravity_accel = 9.81;
  p.arm_radius = 1.0;
  // mu_s * g = omega^2 * r at the limit
  CHECK(gf::max_safe_rotation_speed(p) == doctest::Approx(std::sqrt(5.886)).epsilon(1e-12));
  CHECK(gf::max_safe_rotation_speed(p) == doctest::Approx(2.4261).epsilon(1e-4));
}

TEST_CASE("frictionless arm retains nothing") {
  gf::PhysicalParams p;
  p.static_friction = 0.0;
  CHECK(gf::max_safe_rotation_speed(p) == 0.0);
}

TEST_CASE("default calibration puts the per-tick bound exactly at 0.01") {
  gf::PhysicalParams p;  // arm_radius 588.6, mu_s 0.6, g 9.81
  CHECK(gf::max_safe_rotation_speed_per_tick(p, 0.1) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("seconds convert to ticks rounding half up") {
  gf::ProcessParams p;
  p.tick_duration_s = 0.1;
  CHECK(p.to_ticks(30.0) == 300);
  CHECK(p.to_ticks(0.05) == 1);
  CHECK(p.to_ticks(0.04999) == 0);
  CHECK(p.to_ticks(0.25) == 3);
}

TEST_CASE("total chambers is K plus loader and unloader") {
  gf::ProcessParams p;
  p.num_process_chambers = 3;
  CHECK(p.total_chambers() == 5);
  p.num_process_chambers = 0;
  CHECK(p.total_chambers() == 2);
}

TEST_CASE("validation rejects out-of-range parameters and names the field") {
  gf::ProcessParams p;
  p.num_arms = 3;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("num_arms"), gf::ConfigError);
  p.num_arms = 1;
  p.num_process_chambers = -1;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("num_process_chambers"),
                       gf::ConfigError);
  p.num_process_chambers = 0;
  p.tick_duration_s = 0;
  CHECK_THROWS_AS(p.validate(), gf::ConfigError);

  gf::PhysicalParams ph;
  ph.transfer_speed = 0;
  CHECK_THROWS_WITH_AS(ph.validate(), doctest::Contains("transfer_speed"), gf::ConfigError);
  ph = gf::PhysicalParams{};
  ph.static_friction = 0.1;
  ph.dynamic_friction = 0.2;  // must not exceed static
  CHECK_THROWS_AS(ph.validate(), gf::ConfigError);
  ph = gf::PhysicalParams{};
  ph.process_time_ticks = 0;
  CHECK_THROWS_AS(ph.validate(), gf::ConfigError);

  gf::GeometryParams g;
  g.arm_get_ticks = 0;
  CHECK_THROWS_AS(g.validate(), gf::ConfigError);
}
