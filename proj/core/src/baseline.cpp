#include "glassflow/baseline.hpp"

#include <limits>

#include "glassflow/env.hpp"

namespace gf {

namespace {

struct Candidate {
  long long cost = std::numeric_limits<long long>::max();
  long long signal_age = -1;
  int chamber_id = std::numeric_limits<int>::max();
  int arm_id = std::numeric_limits<int>::max();
  int first_action = -1;

  bool better_than(const Candidate& o) const {
    if (cost != o.cost) return cost < o.cost;
    if (signal_age != o.signal_age) return signal_age > o.signal_age;  // oldest first
    if (chamber_id != o.chamber_id) return chamber_id < o.chamber_id;
    return arm_id < o.arm_id;
  }
};

}  // namespace

std::vector<Signal> collect_signals(const WorldState& w) {
  std::vector<Signal> out;
  for (const Chamber& c : w.chambers) {
    ChamberGlassState s = chamber_glass_state(w, c.id);
    if (c.kind == ChamberKind::Loader) {
      if (s != ChamberGlassState::Empty) {
        const Glass& g = w.glasses.at(*c.occupant);
        out.push_back({c.id, true, s, w.tick - g.state_since});
      }
    } else if (c.kind == ChamberKind::Process) {
      if (s == ChamberGlassState::Processed) {
        const Glass& g = w.glasses.at(*c.occupant);
        out.push_back({c.id, true, s, w.tick - g.state_since});
      } else if (s == ChamberGlassState::Empty) {
        out.push_back({c.id, false, s, w.tick - c.vacant_since});
      }
    } else {  // Unloader
      if (s == ChamberGlassState::Empty)
        out.push_back({c.id, false, s, w.tick - c.vacant_since});
    }
  }
  return out;
}

int baseline_action(const WorldState& w) {
  const int num_chambers = static_cast<int>(w.chambers.size());
  const int num_arms = static_cast<int>(w.robot.arms.size());
  const int unloader_id = num_chambers - 1;
  const long long get_ticks = w.geometry.arm_get_ticks;
  const long long put_ticks = w.geometry.arm_put_ticks;

  auto action_rotate = [&](int chamber) { return chamber; };
  auto action_load = [&](int arm) { return num_chambers + arm; };
  auto action_unload = [&](int arm) { return num_chambers + num_arms + arm; };
  const int action_wait = num_chambers + 2 * num_arms;

  auto faced = facing_chamber(w);
  auto rot_cost_from = [&](double theta, int chamber) -> long long {
    long long t = rotation_ticks(w, theta, chamber);
    // no rotation needed when already parked there
    if (std::abs(w.chambers[chamber].angle - theta) < 1e-12) return 0;
    return t;
  };

  // how many empty process chambers are spoken for by raw glass already held
  int raw_held = 0;
  for (const Arm& a : w.robot.arms)
    if (a.held_glass && w.glasses.at(*a.held_glass).state == GlassState::Raw) raw_held++;
  std::vector<int> empty_process;
  for (const Chamber& c : w.chambers)
    if (c.kind == ChamberKind::Process && !c.occupant) empty_process.push_back(c.id);

  auto nearest_empty_process = [&](double from_theta) -> int {
    int best = -1;
    long long best_cost = std::numeric_limits<long long>::max();
    for (int id : empty_process) {
      long long c = rot_cost_from(from_theta, id);
      if (c < best_cost) {
        best_cost = c;
        best = id;
      }
    }
    return best;
  };

  Candidate best;

  // chains for glass already on an arm
  for (const Arm& arm : w.robot.arms) {
    if (!arm.held_glass) continue;
    const Glass& g = w.glasses.at(*arm.held_glass);
    int dest = -1;
    if (g.state == GlassState::Processed) {
      if (!w.chambers[unloader_id].occupant) dest = unloader_id;
    } else if (g.state == GlassState::Raw) {
      dest = nearest_empty_process(w.robot.theta);
    }
    if (dest < 0) continue;
    Candidate c;
    c.cost = rot_cost_from(w.robot.theta, dest) + put_ticks;
    c.signal_age = w.tick - g.state_since;
    c.chamber_id = dest;
    c.arm_id = arm.id;
    c.first_action = (faced && *faced == dest) ? action_unload(arm.id) : action_rotate(dest);
    if (c.better_than(best)) best = c;
  }

  // pickup chains from out-requesting chambers onto empty arms
  for (const Signal& s : collect_signals(w)) {
    if (!s.out_request) continue;
    const Chamber& src = w.chambers[s.chamber_id];
    const Glass& g = w.glasses.at(*src.occupant);
    int dest = -1;
    if (g.state == GlassState::Processed) {
      if (!w.chambers[unloader_id].occupant) dest = unloader_id;
    } else if (g.state == GlassState::Raw) {
      // keep one empty chamber per raw glass already committed
      if (static_cast<int>(empty_process.size()) > raw_held)
        dest = nearest_empty_process(src.angle);
    }
    if (dest < 0) continue;
    for (const Arm& arm : w.robot.arms) {
      if (arm.held_glass) continue;
      Candidate c;
      c.cost = rot_cost_from(w.robot.theta, src.id) + get_ticks +
               rot_cost_from(src.angle, dest) + put_ticks;
      c.signal_age = s.age_ticks;
      c.chamber_id = src.id;
      c.arm_id = arm.id;
      c.first_action = (faced && *faced == src.id) ? action_load(arm.id) : action_rotate(src.id);
      if (c.better_than(best)) best = c;
    }
  }

  return best.first_action >= 0 ? best.first_action : action_wait;
}

}  // namespace gf
