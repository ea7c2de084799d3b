#include "glassflow/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a) {
  // wrap to (-pi, pi]
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

Event make_event(long long tick, EventKind kind, int glass_id = -1, int chamber_id = -1) {
  Event e;
  e.tick = tick;
  e.kind = kind;
  e.glass_id = glass_id;
  e.chamber_id = chamber_id;
  return e;
}

void emit(WorldState& w, std::vector<Event>& out, Event e) {
  w.event_log.push_back(e);
  out.push_back(std::move(e));
}

// True if chamber angle `a` lies strictly inside the arc swept from `from`
// in direction `dir` over `len` radians.
bool swept_through(double a, double from, double dir, double len) {
  double delta = dir > 0 ? wrap_2pi(a - from) : wrap_2pi(from - a);
  return delta > 1e-12 && delta < len - 1e-12;
}

// Triangular extend/retract profile over an arm command.
double arm_profile(double progress) {
  return progress < 0.5 ? 2.0 * progress : 2.0 * (1.0 - progress);
}

}  // namespace

const char* to_string(GlassState s) {
  switch (s) {
    case GlassState::Raw: return "Raw";
    case GlassState::Processing: return "Processing";
    case GlassState::Processed: return "Processed";
    case GlassState::Dropped: return "Dropped";
    case GlassState::Broken: return "Broken";
    case GlassState::Unloaded: return "Unloaded";
  }
  return "?";
}

const char* to_string(ChamberKind k) {
  switch (k) {
    case ChamberKind::Loader: return "Loader";
    case ChamberKind::Process: return "Process";
    case ChamberKind::Unloader: return "Unloader";
  }
  return "?";
}

const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::RotateTo: return "RotateTo";
    case CommandKind::ArmLoad: return "ArmLoad";
    case CommandKind::ArmUnload: return "ArmUnload";
    case CommandKind::Wait: return "Wait";
  }
  return "?";
}

std::string to_string(const Command& c) {
  if (c.kind == CommandKind::Wait) return "Wait";
  return std::string(to_string(c.kind)) + "(" + std::to_string(c.target) + ")";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::GlassSpawned: return "GlassSpawned";
    case EventKind::ProcessStarted: return "ProcessStarted";
    case EventKind::ProcessCompleted: return "ProcessCompleted";
    case EventKind::GlassDropped: return "GlassDropped";
    case EventKind::GlassBroken: return "GlassBroken";
    case EventKind::GlassUnloaded: return "GlassUnloaded";
    case EventKind::CommandStarted: return "CommandStarted";
    case EventKind::CommandFinished: return "CommandFinished";
  }
  return "?";
}

const char* to_string(ChamberGlassState s) {
  switch (s) {
    case ChamberGlassState::Empty: return "Empty";
    case ChamberGlassState::Raw: return "Raw";
    case ChamberGlassState::Processing: return "Processing";
    case ChamberGlassState::Processed: return "Processed";
  }
  return "?";
}

std::string event_detail(const Event& e) {
  if (e.kind == EventKind::GlassUnloaded) return e.processed ? "processed" : "incomplete";
  if (e.command.has_value()) return to_string(*e.command);
  return "";
}

WorldState build_world(const ProcessParams& process, const PhysicalParams& physical,
                       const GeometryParams& geometry, std::uint64_t seed) {
  process.validate();
  physical.validate();
  geometry.validate();

  WorldState w;
  w.process = process;
  w.physical = physical;
  w.geometry = geometry;
  w.rng.seed(seed);

  const int c = process.total_chambers();
  w.chambers.resize(c);
  for (int i = 0; i < c; ++i) {
    Chamber& ch = w.chambers[i];
    ch.id = i;
    ch.angle = kTwoPi * i / c;
    if (i == 0)
      ch.kind = ChamberKind::Loader;
    else if (i == c - 1)
      ch.kind = ChamberKind::Unloader;
    else
      ch.kind = ChamberKind::Process;
  }

  w.robot.theta = w.chambers[0].angle;
  w.robot.arms.resize(process.num_arms);
  for (int a = 0; a < process.num_arms; ++a) w.robot.arms[a].id = a;
  return w;
}

double facing_tolerance(const WorldState& w) {
  return kTwoPi / w.chambers.size() / 4.0;
}

std::optional<int> facing_chamber(const WorldState& w) {
  double best = 1e18;
  int best_id = -1;
  for (const Chamber& c : w.chambers) {
    double d = std::abs(wrap_pi(w.robot.theta - c.angle));
    if (d < best) {
      best = d;
      best_id = c.id;
    }
  }
  if (best <= facing_tolerance(w) + 1e-12) return best_id;
  return std::nullopt;
}

long long rotation_ticks(const WorldState& w, double from_theta, int chamber_id) {
  double delta = std::abs(wrap_pi(w.chambers.at(chamber_id).angle - from_theta));
  if (delta < 1e-12) return 1;
  return std::max<long long>(
      1, static_cast<long long>(std::ceil(delta / w.physical.transfer_speed - 1e-12)));
}

IssueResult issue_command(WorldState& w, const Command& cmd) {
  if (w.robot.active_command.has_value()) return IssueResult::Busy;

  CommandInProgress cip;
  cip.cmd = cmd;
  cip.started_at = w.tick;
  switch (cmd.kind) {
    case CommandKind::RotateTo: {
      if (cmd.target < 0 || cmd.target >= static_cast<int>(w.chambers.size()))
        return IssueResult::InvalidTarget;
      const double target = w.chambers[cmd.target].angle;
      double delta = wrap_pi(target - w.robot.theta);
      // shorter direction; a half-turn tie goes the positive way, toward
      // increasing chamber index
      if (std::abs(std::abs(delta) - std::numbers::pi) < 1e-12) delta = std::abs(delta);
      cip.rotate_dir = delta >= 0 ? 1.0 : -1.0;
      cip.target_angle = wrap_2pi(target);
      cip.ticks_total = rotation_ticks(w, w.robot.theta, cmd.target);
      break;
    }
    case CommandKind::ArmLoad:
    case CommandKind::ArmUnload: {
      if (cmd.target < 0 || cmd.target >= static_cast<int>(w.robot.arms.size()))
        return IssueResult::InvalidTarget;
      cip.ticks_total =
          cmd.kind == CommandKind::ArmLoad ? w.geometry.arm_get_ticks : w.geometry.arm_put_ticks;
      cip.faced_chamber = facing_chamber(w).value_or(-1);
      break;
    }
    case CommandKind::Wait:
      cip.ticks_total = 1;
      break;
  }

  w.robot.active_command = cip;
  Event e = make_event(w.tick, EventKind::CommandStarted, -1,
                       cmd.kind == CommandKind::RotateTo ? cmd.target : cip.faced_chamber);
  e.command = cmd;
  w.event_log.push_back(e);
  return IssueResult::Ok;
}

ChamberGlassState chamber_glass_state(const WorldState& w, int chamber_id) {
  const Chamber& c = w.chambers.at(chamber_id);
  if (!c.occupant.has_value()) return ChamberGlassState::Empty;
  const Glass& g = w.glasses.at(*c.occupant);
  switch (g.state) {
    case GlassState::Raw: return ChamberGlassState::Raw;
    case GlassState::Processing: return ChamberGlassState::Processing;
    default: return ChamberGlassState::Processed;
  }
}

std::vector<Event> apply_failure_rules(WorldState& w, const MotionInfo& motion) {
  std::vector<Event> out;
  if (!motion.rotated) return out;

  const double omega_max =
      max_safe_rotation_speed_per_tick(w.physical, w.process.tick_duration_s);

  // Drop: carried glass is lost when the commanded rotation speed exceeds
  // the friction bound. Deterministic, sharp threshold.
  if (motion.commanded_speed > omega_max * (1.0 + 1e-12)) {
    for (Arm& arm : w.robot.arms) {
      if (!arm.held_glass) continue;
      Glass& g = w.glasses.at(*arm.held_glass);
      g.state = GlassState::Dropped;
      g.state_since = w.tick;
      g.arm_id = -1;
      arm.held_glass.reset();
      w.counters.dropped++;
      emit(w, out, make_event(w.tick, EventKind::GlassDropped, g.id));
    }
  }

  // Break: an extended arm sweeping through an occupied chamber slot
  // destroys the occupant. Arms are retracted during normal rotation, so
  // this fires only for hand-built states or future kinematics changes.
  double swept = motion.rotate_dir > 0 ? wrap_2pi(motion.to_theta - motion.from_theta)
                                       : wrap_2pi(motion.from_theta - motion.to_theta);
  bool any_extended = std::any_of(w.robot.arms.begin(), w.robot.arms.end(),
                                  [](const Arm& a) { return a.extension > 0.5; });
  if (any_extended && swept > 0) {
    for (Chamber& c : w.chambers) {
      if (!c.occupant) continue;
      if (!swept_through(c.angle, motion.from_theta, motion.rotate_dir, swept)) continue;
      Glass& g = w.glasses.at(*c.occupant);
      g.state = GlassState::Broken;
      g.state_since = w.tick;
      g.chamber_id = -1;
      c.occupant.reset();
      c.vacant_since = w.tick;
      w.counters.broken++;
      emit(w, out, make_event(w.tick, EventKind::GlassBroken, g.id, c.id));
    }
  }
  return out;
}

std::vector<Event> tick(WorldState& w) {
  std::vector<Event> out;
  w.tick++;

  // 1. loader spawn
  Chamber& loader = w.chambers.front();
  if (loader.spawn_cooldown > 0) {
    loader.spawn_cooldown--;
  } else if (!loader.occupant.has_value()) {
    Glass g;
    g.id = w.next_glass_id++;
    // with no process chambers there is no process step to run, so the
    // glass enters already complete
    g.state = w.process.num_process_chambers == 0 ? GlassState::Processed : GlassState::Raw;
    g.chamber_id = loader.id;
    g.state_since = w.tick;
    loader.occupant = g.id;
    loader.spawn_cooldown = w.process.input_interval_ticks();
    w.counters.spawned++;
    w.glasses.emplace(g.id, g);
    emit(w, out, make_event(w.tick, EventKind::GlassSpawned, g.id, loader.id));
  }

  // 2. process timers
  for (Chamber& c : w.chambers) {
    if (c.kind != ChamberKind::Process || !c.occupant) continue;
    Glass& g = w.glasses.at(*c.occupant);
    if (g.state != GlassState::Processing) continue;
    if (--g.process_ticks_remaining <= 0) {
      g.state = GlassState::Processed;
      g.state_since = w.tick;
      g.process_ticks_remaining = 0;
      emit(w, out, make_event(w.tick, EventKind::ProcessCompleted, g.id, c.id));
    }
  }

  // 3. command kinematics
  MotionInfo motion;
  if (w.robot.active_command.has_value()) {
    CommandInProgress& cip = *w.robot.active_command;
    cip.ticks_done++;
    bool finished = cip.ticks_done >= cip.ticks_total;
    int affected_glass = -1;
    int event_chamber = cip.faced_chamber;

    switch (cip.cmd.kind) {
      case CommandKind::RotateTo: {
        motion.rotated = true;
        motion.from_theta = w.robot.theta;
        motion.rotate_dir = cip.rotate_dir;
        motion.commanded_speed = w.physical.transfer_speed;
        double remaining = cip.rotate_dir > 0 ? wrap_2pi(cip.target_angle - w.robot.theta)
                                              : wrap_2pi(w.robot.theta - cip.target_angle);
        double step = std::min(w.physical.transfer_speed, remaining);
        w.robot.theta = wrap_2pi(w.robot.theta + cip.rotate_dir * step);
        if (finished) w.robot.theta = cip.target_angle;
        motion.to_theta = w.robot.theta;
        event_chamber = cip.cmd.target;
        break;
      }
      case CommandKind::ArmLoad:
      case CommandKind::ArmUnload: {
        Arm& arm = w.robot.arms[cip.cmd.target];
        double progress = static_cast<double>(cip.ticks_done) / cip.ticks_total;
        arm.extension = arm_profile(progress);
        arm.height = 0.5 * arm_profile(progress);
        if (finished) {
          arm.extension = 0.0;
          arm.height = 0.0;
          if (cip.faced_chamber >= 0) {
            Chamber& ch = w.chambers[cip.faced_chamber];
            if (cip.cmd.kind == CommandKind::ArmLoad) {
              if (ch.occupant && !arm.held_glass) {
                Glass& g = w.glasses.at(*ch.occupant);
                if (g.state != GlassState::Processing) {
                  ch.occupant.reset();
                  ch.vacant_since = w.tick;
                  arm.held_glass = g.id;
                  arm.guide_pin_engaged = true;
                  g.chamber_id = -1;
                  g.arm_id = arm.id;
                  g.state_since = w.tick;
                  affected_glass = g.id;
                }
              }
            } else {  // ArmUnload
              if (arm.held_glass) {
                Glass& g = w.glasses.at(*arm.held_glass);
                arm.held_glass.reset();
                arm.guide_pin_engaged = false;
                g.arm_id = -1;
                affected_glass = g.id;
                if (ch.occupant) {
                  // the arm rams the placed glass into the occupant
                  g.state = GlassState::Broken;
                  g.state_since = w.tick;
                  w.counters.broken++;
                  emit(w, out, make_event(w.tick, EventKind::GlassBroken, g.id, ch.id));
                } else {
                  ch.occupant = g.id;
                  g.chamber_id = ch.id;
                  g.state_since = w.tick;
                  if (ch.kind == ChamberKind::Process && g.state == GlassState::Raw) {
                    g.state = GlassState::Processing;
                    g.process_ticks_remaining = w.process.process_time_ticks();
                    emit(w, out, make_event(w.tick, EventKind::ProcessStarted, g.id, ch.id));
                  }
                }
              }
            }
          }
        }
        break;
      }
      case CommandKind::Wait:
        break;
    }

    if (finished) {
      Event e = make_event(w.tick, EventKind::CommandFinished, affected_glass, event_chamber);
      e.command = cip.cmd;
      w.robot.active_command.reset();
      emit(w, out, e);
    }
  }

  // 4. failure rules
  for (Event& e : apply_failure_rules(w, motion)) out.push_back(e);

  // 5. unloader consumption
  Chamber& unloader = w.chambers.back();
  if (unloader.occupant.has_value()) {
    Glass& g = w.glasses.at(*unloader.occupant);
    unloader.occupant.reset();
    unloader.vacant_since = w.tick;
    unloader.unload_count++;
    bool processed = g.state == GlassState::Processed;
    g.state = GlassState::Unloaded;
    g.state_since = w.tick;
    g.chamber_id = -1;
    w.counters.unloaded++;
    if (processed)
      w.counters.unloaded_processed++;
    else
      w.counters.unloaded_incomplete++;
    Event e = make_event(w.tick, EventKind::GlassUnloaded, g.id, unloader.id);
    e.processed = processed;
    emit(w, out, e);
  }

  return out;
}

bool conservation_holds(const WorldState& w) {
  long long in_chambers = 0;
  for (const Chamber& c : w.chambers)
    if (c.occupant) in_chambers++;
  long long on_arms = 0;
  for (const Arm& a : w.robot.arms)
    if (a.held_glass) on_arms++;
  return w.counters.spawned == in_chambers + on_arms + w.counters.unloaded +
                                   w.counters.dropped + w.counters.broken;
}

std::string event_log_csv(const std::vector<Event>& log) {
  std::ostringstream os;
  os << "tick,event,glass_id,chamber_id,detail\n";
  for (const Event& e : log) {
    os << e.tick << ',' << to_string(e.kind) << ',' << e.glass_id << ',' << e.chamber_id << ','
       << event_detail(e) << '\n';
  }
  return os.str();
}

std::vector<Event> parse_event_log_csv(const std::string& csv) {
  std::vector<Event> out;
  std::istringstream is(csv);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ls(line);
    std::string tick_s, kind_s, glass_s, chamber_s, detail;
    std::getline(ls, tick_s, ',');
    std::getline(ls, kind_s, ',');
    std::getline(ls, glass_s, ',');
    std::getline(ls, chamber_s, ',');
    std::getline(ls, detail);
    Event e;
    e.tick = std::stoll(tick_s);
    bool found = false;
    for (int k = 0; k <= static_cast<int>(EventKind::CommandFinished); ++k) {
      if (kind_s == to_string(static_cast<EventKind>(k))) {
        e.kind = static_cast<EventKind>(k);
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("unknown event kind: " + kind_s);
    e.glass_id = std::stoi(glass_s);
    e.chamber_id = std::stoi(chamber_s);
    if (e.kind == EventKind::GlassUnloaded) {
      e.processed = detail == "processed";
    } else if (!detail.empty()) {
      // parse command text like "RotateTo(2)" / "Wait"
      Command c;
      auto paren = detail.find('(');
      std::string name = detail.substr(0, paren);
      for (int k = 0; k <= static_cast<int>(CommandKind::Wait); ++k) {
        if (name == to_string(static_cast<CommandKind>(k))) {
          c.kind = static_cast<CommandKind>(k);
          break;
        }
      }
      if (paren != std::string::npos)
        c.target = std::stoi(detail.substr(paren + 1, detail.size() - paren - 2));
      e.command = c;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace gf
