#ifndef GLASSFLOW_ENV_HPP_
#define GLASSFLOW_ENV_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "glassflow/world.hpp"

namespace gf {

enum class ObservationMode { Basic, Reduced };

// Table of reward/penalty values credited per event.
struct RewardTable {
  double processed_arrival = 4.0;
  double time_penalty = -0.01;
  double glass_dropped = -1.0;
  double glass_broken = -1.0;
  double incomplete_arrival = -1.0;

  void validate() const;
};

struct EnvConfig {
  ProcessParams process;
  PhysicalParams physical;
  GeometryParams geometry;
  ObservationMode observation_mode = ObservationMode::Reduced;
  RewardTable rewards;
  int max_glasses_tracked = 0;  // 0 -> K + num_arms + 2
  long long horizon = 100000;   // macro-steps until truncation

  void validate() const;
  int effective_slots() const;
};

// C + 2A + 1 actions, ordered [RotateTo(0..C-1), ArmLoad(0..A-1),
// ArmUnload(0..A-1), Wait]. C counts all chambers including loader and
// unloader.
int action_count(int num_chambers, int num_arms);

Command action_to_command(int action_id, int num_chambers, int num_arms);

// Sum of the per-event rewards (time penalty excluded; step() adds it once
// per macro-step).
double reward_for_events(std::span<const Event> events, const RewardTable& table);

Eigen::VectorXd observe_basic(const WorldState& world, int max_glasses_tracked);
Eigen::VectorXd observe_reduced(const WorldState& world);

int observation_size_basic(int num_chambers, int num_arms, int max_glasses_tracked);
int observation_size_reduced(int num_chambers, int num_arms);

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  long long ticks_elapsed = 0;
  std::vector<Event> events;
  bool truncated = false;  // horizon reached; never a true terminal
};

// Sequential-decision wrapper over the simulator. One macro-action runs the
// underlying command to completion; the observation is taken strictly after
// the command's final tick. Illegal-in-state actions (load from an empty
// chamber, load onto a full arm, unload from an empty arm, arm action while
// facing no chamber) execute as one-tick no-ops carrying only the time
// penalty.
class Env {
 public:
  explicit Env(EnvConfig config);

  Eigen::VectorXd reset(std::uint64_t seed);
  StepResult step(int action_id);

  int action_count() const;
  int observation_size() const;
  long long steps_taken() const { return steps_taken_; }

  const WorldState& world() const { return world_; }
  WorldState& mutable_world() { return world_; }
  const EnvConfig& config() const { return config_; }

  // True if the action would be executed as a penalized no-op.
  bool action_is_noop(int action_id) const;

 private:
  Eigen::VectorXd observe() const;

  EnvConfig config_;
  WorldState world_;
  long long steps_taken_ = 0;
};

// Per-step trace row for training/evaluation curves.
struct TraceRow {
  long long step = 0;
  int action = -1;
  double reward = 0.0;
  long long ticks = 0;
  long long cumulative_unloaded = 0;
  long long cumulative_failed = 0;
};

std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace gf

#endif  // GLASSFLOW_ENV_HPP_
