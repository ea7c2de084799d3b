#ifndef GLASSFLOW_TACT_HPP_
#define GLASSFLOW_TACT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "glassflow/world.hpp"

namespace gf {

// Timing terms of the process-tact expressions. Values are in seconds at
// the interface; the operations convert every term to integer ticks
// (rounding half up) and sum in integers so that decompositions are exact.
struct TactTerms {
  double t_load = 0.0;    // t_L
  double t_unload = 0.0;  // t_U
  double t_get = 0.0;
  double t_put = 0.0;
  std::vector<double> t_rotate;   // t_R legs
  std::vector<double> t_process;  // t_P per process chamber
  std::vector<double> t_wait;     // t_w per wait
};

// Single-process-chamber tact, implemented verbatim as printed:
//   t_Ra + t_get + t_Rb + t_put + t_P + t_w + t_get + t_Rc + t_put + t_U
// (three rotation legs, no loading term). Requires |t_rotate| = 3 and
// |t_process| = |t_wait| = 1.
double process_tact_single(const TactTerms& terms, double tick_duration_s = 1.0);

// General K-chamber tact:
//   t_L + sum t_R + (K+1)(t_get + t_put) + sum t_P + sum t_w + t_U
// Requires |t_rotate| = |t_process| = |t_wait| = K, K >= 1.
double process_tact_general(const TactTerms& terms, int num_chambers,
                            double tick_duration_s = 1.0);

struct TactDecomposition {
  double fixed = 0.0;  // t_L + (K+1)(t_get+t_put) + sum t_P + t_U
  double delta = 0.0;  // sum t_R + sum t_w (the schedule-dependent part)
};

// fixed + delta == process_tact_general, exactly.
TactDecomposition decompose_tact(const TactTerms& terms, int num_chambers,
                                 double tick_duration_s = 1.0);

// (unload tick - spawn tick) * tick_duration, or nullopt when the glass was
// never unloaded.
std::optional<double> measured_tact(const std::vector<Event>& log, int glass_id,
                                    double tick_duration_s);

// Per-glass journey measured from an event log, in ticks. Waits cover idle
// time in chambers; rotations cover everything spent on an arm outside the
// get/put sequences (rotation legs plus any carried waiting).
struct GlassJourney {
  bool completed = false;
  long long spawn_tick = -1;
  long long unload_tick = -1;
  std::vector<long long> waits;
  std::vector<long long> rotations;
  std::vector<long long> processes;
  long long get_ticks_total = 0;
  long long put_ticks_total = 0;
  int process_visits = 0;

  long long tact_ticks() const { return unload_tick - spawn_tick; }
  long long delta_ticks() const;  // sum of waits + rotations
  long long fixed_ticks() const;  // gets + puts + processes
};

GlassJourney measure_journey(const std::vector<Event>& log, int glass_id);

enum class TimetableResource { Robot, Chamber };
enum class TimetableActivity { Moving, Idle, Process, Load, Unload };

const char* to_string(TimetableActivity a);

struct TimetableRow {
  TimetableResource resource = TimetableResource::Robot;
  int chamber_id = -1;  // valid for Chamber rows
  TimetableActivity activity = TimetableActivity::Idle;
  long long start_tick = 0;
  long long end_tick = 0;
  int glass_id = -1;
};

struct Timetable {
  std::vector<TimetableRow> rows;  // sorted by resource, then start tick
};

// Builds per-resource activity intervals from a well-formed event log.
// Throws std::invalid_argument on out-of-order logs.
Timetable build_timetable(const std::vector<Event>& log);

// Gantt exports: CSV (resource,activity,start_s,end_s,glass_id) and a
// standalone SVG with one horizontal band per resource.
std::string timetable_csv(const Timetable& tt, double tick_duration_s);
std::string timetable_svg(const Timetable& tt, double tick_duration_s);

}  // namespace gf

#endif  // GLASSFLOW_TACT_HPP_
