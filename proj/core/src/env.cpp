#include "glassflow/env.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gf {

namespace {

double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  if (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  return a;
}

bool glass_live(const Glass& g) {
  return g.state == GlassState::Raw || g.state == GlassState::Processing ||
         g.state == GlassState::Processed;
}

// planar position on the (scaled to unit radius) layout circle
struct Vec2 {
  double x = 0, z = 0;
};

Vec2 glass_position(const WorldState& w, const Glass& g) {
  if (g.chamber_id >= 0) {
    double a = w.chambers[g.chamber_id].angle;
    return {std::cos(a), std::sin(a)};
  }
  if (g.arm_id >= 0) {
    const Arm& arm = w.robot.arms[g.arm_id];
    return {arm.extension * std::cos(w.robot.theta), arm.extension * std::sin(w.robot.theta)};
  }
  return {0, 0};
}

}  // namespace

void RewardTable::validate() const {
  if (processed_arrival <= 0) throw ConfigError("reward_processed_arrival: > 0 required");
  if (time_penalty > 0 || glass_dropped > 0 || glass_broken > 0 || incomplete_arrival > 0)
    throw ConfigError("penalties: <= 0 required");
}

void EnvConfig::validate() const {
  process.validate();
  physical.validate();
  geometry.validate();
  rewards.validate();
  if (horizon < 1) throw ConfigError("horizon: >= 1 required");
  int min_slots = process.num_process_chambers + process.num_arms + 2;
  if (max_glasses_tracked != 0 && max_glasses_tracked < min_slots)
    throw ConfigError("max_glasses_tracked: >= K + num_arms + 2 required");
}

int EnvConfig::effective_slots() const {
  return max_glasses_tracked > 0 ? max_glasses_tracked
                                 : process.num_process_chambers + process.num_arms + 2;
}

int action_count(int num_chambers, int num_arms) {
  if (num_chambers < 1) throw ConfigError("num_chambers: >= 1 required");
  if (num_arms != 1 && num_arms != 2) throw ConfigError("num_arms: must be 1 or 2");
  return num_chambers + 2 * num_arms + 1;
}

Command action_to_command(int id, int c, int a) {
  if (id < 0 || id >= action_count(c, a)) throw std::out_of_range("action id out of range");
  if (id < c) return Command::rotate_to(id);
  if (id < c + a) return Command::arm_load(id - c);
  if (id < c + 2 * a) return Command::arm_unload(id - c - a);
  return Command::wait();
}

double reward_for_events(std::span<const Event> events, const RewardTable& table) {
  double r = 0.0;
  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::GlassUnloaded:
        r += e.processed ? table.processed_arrival : table.incomplete_arrival;
        break;
      case EventKind::GlassDropped:
        r += table.glass_dropped;
        break;
      case EventKind::GlassBroken:
        r += table.glass_broken;
        break;
      default:
        break;
    }
  }
  return r;
}

int observation_size_basic(int c, int a, int slots) {
  return 2 * c + 2 + 3 * a + 3 * slots + c + a;
}

int observation_size_reduced(int c, int a) { return 4 * c + (c + 1) + 3 * a; }

Eigen::VectorXd observe_basic(const WorldState& w, int slots) {
  const int c = static_cast<int>(w.chambers.size());
  const int a = static_cast<int>(w.robot.arms.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(observation_size_basic(c, a, slots));
  int i = 0;
  for (const Chamber& ch : w.chambers) {
    v[i++] = std::cos(ch.angle);
    v[i++] = std::sin(ch.angle);
  }
  v[i++] = std::sin(w.robot.theta);
  v[i++] = std::cos(w.robot.theta);
  for (const Arm& arm : w.robot.arms) {
    v[i++] = arm.extension;
    v[i++] = arm.height;
    v[i++] = arm.held_glass ? 1.0 : 0.0;
  }
  // glass slots by id modulo slot count; on collision the lowest live id wins
  std::vector<const Glass*> slot_glass(slots, nullptr);
  for (const auto& [id, g] : w.glasses) {
    if (!glass_live(g)) continue;
    int s = id % slots;
    if (!slot_glass[s]) slot_glass[s] = &g;
  }
  for (int s = 0; s < slots; ++s) {
    if (slot_glass[s]) {
      Vec2 p = glass_position(w, *slot_glass[s]);
      v[i++] = 1.0;
      v[i++] = p.x;
      v[i++] = p.z;
    } else {
      i += 3;
    }
  }
  for (const Chamber& ch : w.chambers)
    v[i++] = std::abs(wrap_pi(w.robot.theta - ch.angle)) / std::numbers::pi;
  for (const Arm& arm : w.robot.arms) {
    Vec2 tip{arm.extension * std::cos(w.robot.theta), arm.extension * std::sin(w.robot.theta)};
    double best = 2.0;  // layout diameter; reported when no glass is in play
    for (const auto& [id, g] : w.glasses) {
      if (!glass_live(g)) continue;
      Vec2 p = glass_position(w, g);
      best = std::min(best, std::hypot(p.x - tip.x, p.z - tip.z));
    }
    v[i++] = best;
  }
  return v;
}

Eigen::VectorXd observe_reduced(const WorldState& w) {
  const int c = static_cast<int>(w.chambers.size());
  const int a = static_cast<int>(w.robot.arms.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(observation_size_reduced(c, a));
  int i = 0;
  for (const Chamber& ch : w.chambers) {
    v[i + static_cast<int>(chamber_glass_state(w, ch.id))] = 1.0;
    i += 4;
  }
  auto facing = facing_chamber(w);
  v[i + (facing ? *facing : c)] = 1.0;  // last slot = between chambers
  i += c + 1;
  for (const Arm& arm : w.robot.arms) {
    int k = 0;  // None
    if (arm.held_glass) {
      const Glass& g = w.glasses.at(*arm.held_glass);
      k = g.state == GlassState::Raw ? 1 : 2;
    }
    v[i + k] = 1.0;
    i += 3;
  }
  return v;
}

Env::Env(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  world_ = build_world(config_.process, config_.physical, config_.geometry, 0);
}

Eigen::VectorXd Env::reset(std::uint64_t seed) {
  world_ = build_world(config_.process, config_.physical, config_.geometry, seed);
  steps_taken_ = 0;
  return observe();
}

int Env::action_count() const {
  return gf::action_count(static_cast<int>(world_.chambers.size()), config_.process.num_arms);
}

int Env::observation_size() const {
  const int c = static_cast<int>(world_.chambers.size());
  const int a = config_.process.num_arms;
  return config_.observation_mode == ObservationMode::Basic
             ? observation_size_basic(c, a, config_.effective_slots())
             : observation_size_reduced(c, a);
}

Eigen::VectorXd Env::observe() const {
  return config_.observation_mode == ObservationMode::Basic
             ? observe_basic(world_, config_.effective_slots())
             : observe_reduced(world_);
}

bool Env::action_is_noop(int id) const {
  Command cmd = action_to_command(id, static_cast<int>(world_.chambers.size()),
                                  config_.process.num_arms);
  switch (cmd.kind) {
    case CommandKind::RotateTo:
    case CommandKind::Wait:
      return false;
    case CommandKind::ArmLoad: {
      const Arm& arm = world_.robot.arms[cmd.target];
      if (arm.held_glass) return true;
      auto faced = facing_chamber(world_);
      if (!faced) return true;
      ChamberGlassState s = chamber_glass_state(world_, *faced);
      return s == ChamberGlassState::Empty || s == ChamberGlassState::Processing;
    }
    case CommandKind::ArmUnload: {
      const Arm& arm = world_.robot.arms[cmd.target];
      if (!arm.held_glass) return true;
      return !facing_chamber(world_).has_value();
    }
  }
  return false;
}

StepResult Env::step(int id) {
  StepResult res;
  if (action_is_noop(id)) {
    res.events = tick(world_);
    res.ticks_elapsed = 1;
  } else {
    Command cmd = action_to_command(id, static_cast<int>(world_.chambers.size()),
                                    config_.process.num_arms);
    IssueResult ir = issue_command(world_, cmd);
    if (ir != IssueResult::Ok)
      throw std::logic_error("issue_command failed inside step: interlock violated");
    while (world_.robot.active_command.has_value()) {
      std::vector<Event> evs = tick(world_);
      res.events.insert(res.events.end(), evs.begin(), evs.end());
      res.ticks_elapsed++;
    }
  }
  res.reward = reward_for_events(res.events, config_.rewards) + config_.rewards.time_penalty;
  res.observation = observe();
  steps_taken_++;
  res.truncated = steps_taken_ >= config_.horizon;
  return res;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os << "step,action,reward,ticks,cumulative_unloaded,cumulative_failed\n";
  for (const TraceRow& r : rows) {
    os << r.step << ',' << r.action << ',' << r.reward << ',' << r.ticks << ','
       << r.cumulative_unloaded << ',' << r.cumulative_failed << '\n';
  }
  return os.str();
}

}  // namespace gf
