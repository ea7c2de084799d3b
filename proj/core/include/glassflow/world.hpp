#ifndef GLASSFLOW_WORLD_HPP_
#define GLASSFLOW_WORLD_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glassflow/params.hpp"

namespace gf {

enum class GlassState { Raw, Processing, Processed, Dropped, Broken, Unloaded };

const char* to_string(GlassState s);

struct Glass {
  int id = -1;
  GlassState state = GlassState::Raw;
  // Location: exactly one of chamber_id / arm_id is >= 0 while the glass is
  // in play; both are -1 once it leaves play.
  int chamber_id = -1;
  int arm_id = -1;
  long long process_ticks_remaining = 0;
  long long state_since = 0;  // tick of the last state/location change
};

enum class ChamberKind { Loader, Process, Unloader };

const char* to_string(ChamberKind k);

struct Chamber {
  int id = -1;
  ChamberKind kind = ChamberKind::Process;
  double angle = 0.0;  // position on the robot's theta axis
  std::optional<int> occupant;
  long long spawn_cooldown = 0;  // loader only
  long long unload_count = 0;    // unloader only
  long long vacant_since = 0;
};

struct Arm {
  int id = -1;
  double extension = 0.0;  // 0 = retracted, 1 = at chamber
  double height = 0.0;
  std::optional<int> held_glass;
  bool guide_pin_engaged = false;
};

enum class CommandKind { RotateTo, ArmLoad, ArmUnload, Wait };

const char* to_string(CommandKind k);

struct Command {
  CommandKind kind = CommandKind::Wait;
  int target = -1;  // chamber id for RotateTo, arm id for ArmLoad/ArmUnload

  static Command rotate_to(int chamber_id) { return {CommandKind::RotateTo, chamber_id}; }
  static Command arm_load(int arm_id) { return {CommandKind::ArmLoad, arm_id}; }
  static Command arm_unload(int arm_id) { return {CommandKind::ArmUnload, arm_id}; }
  static Command wait() { return {CommandKind::Wait, -1}; }
};

std::string to_string(const Command& c);

struct CommandInProgress {
  Command cmd;
  long long ticks_total = 0;
  long long ticks_done = 0;
  int faced_chamber = -1;   // chamber faced when an arm command was issued
  double rotate_dir = 0.0;  // +1 ccw, -1 cw
  double target_angle = 0.0;
  long long started_at = 0;
};

struct Robot {
  double theta = 0.0;
  std::vector<Arm> arms;
  std::optional<CommandInProgress> active_command;
};

enum class EventKind {
  GlassSpawned,
  ProcessStarted,
  ProcessCompleted,
  GlassDropped,
  GlassBroken,
  GlassUnloaded,
  CommandStarted,
  CommandFinished,
};

const char* to_string(EventKind k);

struct Event {
  long long tick = 0;
  EventKind kind = EventKind::GlassSpawned;
  int glass_id = -1;
  int chamber_id = -1;
  bool processed = false;  // GlassUnloaded only
  std::optional<Command> command;
};

// detail column used by the CSV export; command text or processed flag.
std::string event_detail(const Event& e);

struct Counters {
  long long spawned = 0;
  long long unloaded = 0;
  long long unloaded_processed = 0;
  long long unloaded_incomplete = 0;
  long long dropped = 0;
  long long broken = 0;
};

struct WorldState {
  ProcessParams process;
  PhysicalParams physical;
  GeometryParams geometry;
  long long tick = 0;
  std::vector<Chamber> chambers;
  Robot robot;
  std::map<int, Glass> glasses;
  int next_glass_id = 0;
  std::mt19937_64 rng;
  std::vector<Event> event_log;
  Counters counters;

  const Chamber& loader() const { return chambers.front(); }
  const Chamber& unloader() const { return chambers.back(); }
};

// Places Loader, Process 1..K, Unloader at equal angular spacing on a circle
// and parks the robot at the loader. Throws ConfigError on bad parameters.
WorldState build_world(const ProcessParams& process, const PhysicalParams& physical,
                       const GeometryParams& geometry, std::uint64_t seed);

// Advances one tick: loader spawn, process timers, command kinematics,
// failure rules, unloader consumption. Returns the events of this tick
// (also appended to world.event_log). Total function.
std::vector<Event> tick(WorldState& world);

enum class IssueResult { Ok, Busy, InvalidTarget };

// Installs cmd if the robot is idle. Busy/InvalidTarget leave the world
// unchanged. Emits CommandStarted on success.
IssueResult issue_command(WorldState& world, const Command& cmd);

enum class ChamberGlassState { Empty, Raw, Processing, Processed };

const char* to_string(ChamberGlassState s);

// Sensor reading used by the reduced observation and the baseline
// dispatcher. Throws std::out_of_range on a bad id.
ChamberGlassState chamber_glass_state(const WorldState& world, int chamber_id);

// What the robot did during the current tick, as seen by the failure rules.
struct MotionInfo {
  bool rotated = false;
  double from_theta = 0.0;
  double to_theta = 0.0;
  double rotate_dir = 0.0;
  double commanded_speed = 0.0;  // radians per tick
};

// (a) Drop: carried glass is lost when rotating faster than the safe bound.
// (b) Break: an extended arm sweeping through an occupied chamber slot
// destroys the occupant. Called once per tick after motion integration.
std::vector<Event> apply_failure_rules(WorldState& world, const MotionInfo& motion);

// Chamber the robot currently faces, if within the facing tolerance
// (a quarter of the inter-chamber gap), else nullopt.
std::optional<int> facing_chamber(const WorldState& world);
double facing_tolerance(const WorldState& world);

// Ticks a rotation from the current pose to the chamber would take.
long long rotation_ticks(const WorldState& world, double from_theta, int chamber_id);

// spawned == in-chambers + on-arms + unloaded + dropped + broken.
bool conservation_holds(const WorldState& world);

// Event log export, columns: tick,event,glass_id,chamber_id,detail.
std::string event_log_csv(const std::vector<Event>& log);
std::vector<Event> parse_event_log_csv(const std::string& csv);

}  // namespace gf

#endif  // GLASSFLOW_WORLD_HPP_
