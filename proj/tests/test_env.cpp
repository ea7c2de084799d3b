#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "glassflow/env.hpp"

namespace {

gf::EnvConfig make_config(int k, int arms, gf::ObservationMode mode) {
  gf::EnvConfig c;
  c.process.num_process_chambers = k;
  c.process.num_arms = arms;
  c.observation_mode = mode;
  return c;
}

}  // namespace

TEST_CASE("the action set is rotations, loads, unloads, and wait") {
  CHECK(gf::action_count(5, 2) == 10);
  CHECK(gf::action_count(2, 1) == 5);
  CHECK_THROWS_AS(gf::action_count(0, 1), gf::ConfigError);

  // boundary decoding for C=5, A=2
  CHECK(gf::action_to_command(0, 5, 2).kind == gf::CommandKind::RotateTo);
  CHECK(gf::action_to_command(4, 5, 2).kind == gf::CommandKind::RotateTo);
  CHECK(gf::action_to_command(4, 5, 2).target == 4);
  CHECK(gf::action_to_command(5, 5, 2).kind == gf::CommandKind::ArmLoad);
  CHECK(gf::action_to_command(6, 5, 2).target == 1);
  CHECK(gf::action_to_command(7, 5, 2).kind == gf::CommandKind::ArmUnload);
  CHECK(gf::action_to_command(9, 5, 2).kind == gf::CommandKind::Wait);
  CHECK_THROWS_AS(gf::action_to_command(10, 5, 2), std::out_of_range);
  CHECK_THROWS_AS(gf::action_to_command(-1, 5, 2), std::out_of_range);
}

TEST_CASE("observation sizes follow the layout") {
  // reduced: 4C chamber one-hots + (C+1) facing + 3A arm one-hots
  CHECK(gf::observation_size_reduced(3, 2) == 22);  // K=1 world
  CHECK(gf::observation_size_reduced(2, 1) == 14);  // K=0 world
  gf::Env env(make_config(1, 2, gf::ObservationMode::Reduced));
  CHECK(env.observation_size() == 22);
  CHECK(env.reset(3).size() == 22);

  gf::Env basic(make_config(1, 1, gf::ObservationMode::Basic));
  CHECK(basic.observation_size() ==
        gf::observation_size_basic(3, 1, basic.config().effective_slots()));
  CHECK(basic.reset(3).size() == basic.observation_size());
}

TEST_CASE("reset is deterministic and step sequences replay exactly") {
  gf::Env a(make_config(2, 2, gf::ObservationMode::Reduced));
  gf::Env b(make_config(2, 2, gf::ObservationMode::Reduced));
  Eigen::VectorXd oa = a.reset(17);
  Eigen::VectorXd ob = b.reset(17);
  CHECK(oa == ob);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    int act = static_cast<int>(rng() % a.action_count());
    gf::StepResult ra = a.step(act);
    gf::StepResult rb = b.step(act);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.ticks_elapsed == rb.ticks_elapsed);
    CHECK(ra.observation == rb.observation);
  }
}

TEST_CASE("wait costs exactly one tick and the time penalty") {
  gf::Env env(make_config(1, 1, gf::ObservationMode::Reduced));
  env.reset(0);
  int wait = env.action_count() - 1;
  gf::StepResult r = env.step(wait);
  CHECK(r.ticks_elapsed == 1);
  CHECK(r.reward == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK(!r.truncated);
}

TEST_CASE("delivering a finished glass pays out net +3.99") {
  // K=0: the spawned glass is already complete
  gf::Env env(make_config(0, 1, gf::ObservationMode::Reduced));
  env.reset(0);
  const int C = 2, load0 = C, unload0 = C + 1, wait = C + 2;
  while (!env.world().loader().occupant.has_value()) env.step(wait);
  env.step(load0);
  env.step(0 + 1);  // rotate to the unloader
  gf::StepResult r = env.step(unload0);
  CHECK(r.reward == doctest::Approx(4.0 - 0.01).epsilon(1e-12));
  CHECK(env.world().counters.unloaded_processed == 1);
}

TEST_CASE("delivering a raw glass is penalized as an incomplete arrival") {
  gf::Env env(make_config(1, 1, gf::ObservationMode::Reduced));
  env.reset(0);
  const int C = 3, load0 = C, unload0 = C + 1, wait = C + 2;
  while (!env.world().loader().occupant.has_value()) env.step(wait);
  env.step(load0);
  env.step(2);  // rotate straight to the unloader, skipping the process step
  gf::StepResult r = env.step(unload0);
  CHECK(r.reward == doctest::Approx(-1.0 - 0.01).epsilon(1e-12));
  CHECK(env.world().counters.unloaded == 1);
  CHECK(env.world().counters.unloaded_processed == 0);
}

TEST_CASE("illegal-in-state actions are one-tick penalized no-ops") {
  gf::Env env(make_config(1, 1, gf::ObservationMode::Reduced));
  env.reset(0);
  const int C = 3, load0 = C, unload0 = C + 1;
  CHECK(env.action_is_noop(unload0));  // empty arm
  gf::StepResult r = env.step(unload0);
  CHECK(r.ticks_elapsed == 1);
  CHECK(r.reward == doctest::Approx(-0.01).epsilon(1e-12));

  // load from an empty chamber: also a no-op
  CHECK(!env.world().chambers[1].occupant.has_value());
  long long s0 = env.world().tick;
  env.step(1);  // rotate to chamber 1 (legal)
  CHECK(env.world().tick > s0);
  CHECK(env.action_is_noop(load0));
  r = env.step(load0);
  CHECK(r.ticks_elapsed == 1);
  CHECK(env.world().glasses.size() <= 1);
}

TEST_CASE("unloading onto an occupied chamber is legal, not a no-op") {
  gf::Env env(make_config(1, 2, gf::ObservationMode::Reduced));
  env.reset(0);
  const int C = 3, load0 = C, load1 = C + 1, unload0 = C + 2, wait = C + 4;
  while (!env.world().loader().occupant.has_value()) env.step(wait);
  env.step(load0);
  env.step(1);
  env.step(unload0);  // glass now processing in chamber 1
  env.step(0);
  while (!env.world().loader().occupant.has_value()) env.step(wait);
  env.step(load0);
  env.step(1);
  CHECK(!env.action_is_noop(unload0));
  gf::StepResult r = env.step(unload0);
  CHECK(r.reward == doctest::Approx(-1.0 - 0.01).epsilon(1e-12));
  CHECK(env.world().counters.broken == 1);
  (void)load1;
}

TEST_CASE("reduced observation is valid one-hot blocks at every step") {
  gf::Env env(make_config(3, 2, gf::ObservationMode::Reduced));
  Eigen::VectorXd obs = env.reset(11);
  const int C = 5, A = 2;
  std::mt19937_64 rng(123);
  for (int step = 0; step < 400; ++step) {
    // 4-way chamber blocks, then the (C+1) facing block, then 3-way arm blocks
    for (int c = 0; c < C; ++c) {
      double s = obs.segment(4 * c, 4).sum();
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      for (int j = 0; j < 4; ++j) CHECK((obs[4 * c + j] == 0.0 || obs[4 * c + j] == 1.0));
    }
    CHECK(obs.segment(4 * C, C + 1).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int a = 0; a < A; ++a)
      CHECK(obs.segment(4 * C + C + 1 + 3 * a, 3).sum() == doctest::Approx(1.0).epsilon(1e-12));
    obs = env.step(static_cast<int>(rng() % env.action_count())).observation;
  }
}

TEST_CASE("facing block flips to the target chamber after a rotation") {
  gf::Env env(make_config(3, 2, gf::ObservationMode::Reduced));
  env.reset(0);
  const int C = 5;
  Eigen::VectorXd obs = env.step(3).observation;  // rotate to chamber 3
  CHECK(obs[4 * C + 3] == 1.0);
  obs = env.step(0).observation;
  CHECK(obs[4 * C + 0] == 1.0);
}

TEST_CASE("basic observation exposes geometry and occupancy") {
  gf::Env env(make_config(1, 1, gf::ObservationMode::Basic));
  Eigen::VectorXd obs = env.reset(0);
  const gf::WorldState& w = env.world();
  const int C = 3;
  // per-chamber (cos, sin) of the chamber angle
  for (int c = 0; c < C; ++c) {
    CHECK(obs[2 * c] == doctest::Approx(std::cos(w.chambers[c].angle)).epsilon(1e-12));
    CHECK(obs[2 * c + 1] == doctest::Approx(std::sin(w.chambers[c].angle)).epsilon(1e-12));
  }
  // robot heading (sin, cos) at theta = 0
  CHECK(obs[2 * C] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(obs[2 * C + 1] == doctest::Approx(1.0).epsilon(1e-12));

  int wait = env.action_count() - 1;
  while (!env.world().loader().occupant.has_value()) obs = env.step(wait).observation;
  // a slot now reports presence
  int slots = env.config().effective_slots();
  int slot_base = 2 * C + 2 + 3 * 1;  // after chambers, robot, one arm block
  double presence = 0.0;
  for (int s = 0; s < slots; ++s) presence += obs[slot_base + 3 * s];
  CHECK(presence == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observations are taken strictly after the command finishes") {
  gf::Env env(make_config(1, 1, gf::ObservationMode::Reduced));
  env.reset(0);
  gf::StepResult r = env.step(2);  // multi-tick rotation
  CHECK(r.ticks_elapsed > 1);
  CHECK(!env.world().robot.active_command.has_value());
  // facing one-hot reflects the completed rotation
  CHECK(r.observation[4 * 3 + 2] == 1.0);
}

TEST_CASE("episode reward ledger equals event payouts plus step penalties") {
  gf::Env env(make_config(2, 2, gf::ObservationMode::Reduced));
  env.reset(21);
  std::mt19937_64 rng(77);
  double total = 0.0;
  long long steps = 600;
  std::vector<gf::Event> all_events;
  for (long long i = 0; i < steps; ++i) {
    gf::StepResult r = env.step(static_cast<int>(rng() % env.action_count()));
    total += r.reward;
    all_events.insert(all_events.end(), r.events.begin(), r.events.end());
    CHECK(r.observation.size() == env.observation_size());
  }
  double expected = gf::reward_for_events(all_events, env.config().rewards) +
                    static_cast<double>(steps) * env.config().rewards.time_penalty;
  CHECK(total == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("the horizon truncates and never terminates early") {
  gf::EnvConfig c = make_config(1, 1, gf::ObservationMode::Reduced);
  c.horizon = 5;
  gf::Env env(c);
  env.reset(0);
  int wait = env.action_count() - 1;
  for (int i = 0; i < 4; ++i) CHECK(!env.step(wait).truncated);
  CHECK(env.step(wait).truncated);
}
