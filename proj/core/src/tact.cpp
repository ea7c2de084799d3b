#include "glassflow/tact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gf {

namespace {

long long to_ticks(double seconds, double tick_s) {
  return static_cast<long long>(std::floor(seconds / tick_s + 0.5));
}

long long sum_ticks(const std::vector<double>& v, double tick_s) {
  long long s = 0;
  for (double x : v) s += to_ticks(x, tick_s);
  return s;
}

void require_arity(const TactTerms& t, int rotations, int chambers) {
  if (static_cast<int>(t.t_rotate.size()) != rotations)
    throw std::invalid_argument("t_rotate: expected " + std::to_string(rotations) +
                                " legs, got " + std::to_string(t.t_rotate.size()));
  if (static_cast<int>(t.t_process.size()) != chambers)
    throw std::invalid_argument("t_process: expected " + std::to_string(chambers) +
                                " entries, got " + std::to_string(t.t_process.size()));
  if (static_cast<int>(t.t_wait.size()) != chambers)
    throw std::invalid_argument("t_wait: expected " + std::to_string(chambers) +
                                " entries, got " + std::to_string(t.t_wait.size()));
}

}  // namespace

double process_tact_single(const TactTerms& t, double tick_s) {
  require_arity(t, 3, 1);
  long long ticks = to_ticks(t.t_rotate[0], tick_s) + to_ticks(t.t_get, tick_s) +
                    to_ticks(t.t_rotate[1], tick_s) + to_ticks(t.t_put, tick_s) +
                    to_ticks(t.t_process[0], tick_s) + to_ticks(t.t_wait[0], tick_s) +
                    to_ticks(t.t_get, tick_s) + to_ticks(t.t_rotate[2], tick_s) +
                    to_ticks(t.t_put, tick_s) + to_ticks(t.t_unload, tick_s);
  return ticks * tick_s;
}

double process_tact_general(const TactTerms& t, int k, double tick_s) {
  if (k < 1) throw std::invalid_argument("num_chambers: K >= 1 required");
  require_arity(t, k, k);
  TactDecomposition d = decompose_tact(t, k, tick_s);
  return d.fixed + d.delta;
}

TactDecomposition decompose_tact(const TactTerms& t, int k, double tick_s) {
  if (k < 1) throw std::invalid_argument("num_chambers: K >= 1 required");
  require_arity(t, k, k);
  long long fixed = to_ticks(t.t_load, tick_s) +
                    (k + 1) * (to_ticks(t.t_get, tick_s) + to_ticks(t.t_put, tick_s)) +
                    sum_ticks(t.t_process, tick_s) + to_ticks(t.t_unload, tick_s);
  long long delta = sum_ticks(t.t_rotate, tick_s) + sum_ticks(t.t_wait, tick_s);
  return {fixed * tick_s, delta * tick_s};
}

std::optional<double> measured_tact(const std::vector<Event>& log, int glass_id,
                                    double tick_s) {
  long long spawn = -1, unload = -1;
  for (const Event& e : log) {
    if (e.glass_id != glass_id) continue;
    if (e.kind == EventKind::GlassSpawned) spawn = e.tick;
    if (e.kind == EventKind::GlassUnloaded) unload = e.tick;
  }
  if (spawn < 0 || unload < 0) return std::nullopt;
  return (unload - spawn) * tick_s;
}

long long GlassJourney::delta_ticks() const {
  long long s = 0;
  for (long long w : waits) s += w;
  for (long long r : rotations) s += r;
  return s;
}

long long GlassJourney::fixed_ticks() const {
  long long s = get_ticks_total + put_ticks_total;
  for (long long p : processes) s += p;
  return s;
}

GlassJourney measure_journey(const std::vector<Event>& log, int glass_id) {
  GlassJourney j;
  long long cmd_start = -1;           // start tick of the command in progress
  long long ready_since = -1;         // when the glass last became pickable
  long long carried_since = -1;       // end of the pickup that put it on an arm
  long long process_started = -1;
  for (const Event& e : log) {
    if (e.kind == EventKind::CommandStarted) {
      cmd_start = e.tick;
      continue;
    }
    if (e.glass_id != glass_id) continue;
    switch (e.kind) {
      case EventKind::GlassSpawned:
        j.spawn_tick = e.tick;
        ready_since = e.tick;
        break;
      case EventKind::CommandFinished:
        if (!e.command) break;
        if (e.command->kind == CommandKind::ArmLoad) {
          if (ready_since >= 0) j.waits.push_back(cmd_start - ready_since);
          j.get_ticks_total += e.tick - cmd_start;
          carried_since = e.tick;
          ready_since = -1;
        } else if (e.command->kind == CommandKind::ArmUnload) {
          if (carried_since >= 0) j.rotations.push_back(cmd_start - carried_since);
          j.put_ticks_total += e.tick - cmd_start;
          carried_since = -1;
        }
        break;
      case EventKind::ProcessStarted:
        process_started = e.tick;
        break;
      case EventKind::ProcessCompleted:
        j.processes.push_back(e.tick - process_started);
        j.process_visits++;
        ready_since = e.tick;
        break;
      case EventKind::GlassUnloaded:
        j.unload_tick = e.tick;
        j.completed = true;
        break;
      default:
        break;
    }
  }
  return j;
}

const char* to_string(TimetableActivity a) {
  switch (a) {
    case TimetableActivity::Moving: return "Moving";
    case TimetableActivity::Idle: return "Idle";
    case TimetableActivity::Process: return "Process";
    case TimetableActivity::Load: return "Load";
    case TimetableActivity::Unload: return "Unload";
  }
  return "?";
}

Timetable build_timetable(const std::vector<Event>& log) {
  Timetable tt;
  long long prev = -1;
  for (const Event& e : log) {
    if (e.tick < prev) throw std::invalid_argument("event log out of order");
    prev = e.tick;
  }
  if (log.empty()) return tt;
  const long long span_end = log.back().tick;

  // robot rows from command events
  std::vector<TimetableRow> robot_rows;
  long long cmd_start = -1;
  std::optional<Command> cmd;
  for (const Event& e : log) {
    if (e.kind == EventKind::CommandStarted) {
      cmd_start = e.tick;
      cmd = e.command;
    } else if (e.kind == EventKind::CommandFinished && cmd.has_value()) {
      TimetableRow r;
      r.resource = TimetableResource::Robot;
      r.start_tick = cmd_start;
      r.end_tick = e.tick;
      r.glass_id = e.glass_id;
      switch (cmd->kind) {
        case CommandKind::RotateTo: r.activity = TimetableActivity::Moving; break;
        case CommandKind::ArmLoad: r.activity = TimetableActivity::Load; break;
        case CommandKind::ArmUnload: r.activity = TimetableActivity::Unload; break;
        case CommandKind::Wait: r.activity = TimetableActivity::Idle; break;
      }
      if (r.end_tick > r.start_tick) robot_rows.push_back(r);
      cmd.reset();
    }
  }

  // chamber process rows
  std::map<int, std::vector<TimetableRow>> chamber_rows;
  std::map<std::pair<int, int>, long long> process_start;  // (chamber, glass)
  for (const Event& e : log) {
    if (e.kind == EventKind::ProcessStarted) {
      process_start[{e.chamber_id, e.glass_id}] = e.tick;
    } else if (e.kind == EventKind::ProcessCompleted) {
      auto it = process_start.find({e.chamber_id, e.glass_id});
      if (it == process_start.end()) continue;
      TimetableRow r;
      r.resource = TimetableResource::Chamber;
      r.chamber_id = e.chamber_id;
      r.activity = TimetableActivity::Process;
      r.start_tick = it->second;
      r.end_tick = e.tick;
      r.glass_id = e.glass_id;
      chamber_rows[e.chamber_id].push_back(r);
      process_start.erase(it);
    }
  }

  auto fill_gaps = [&](std::vector<TimetableRow>& rows, TimetableResource res, int chamber) {
    std::vector<TimetableRow> filled;
    long long cursor = 0;
    for (const TimetableRow& r : rows) {
      if (r.start_tick > cursor) {
        TimetableRow idle;
        idle.resource = res;
        idle.chamber_id = chamber;
        idle.activity = TimetableActivity::Idle;
        idle.start_tick = cursor;
        idle.end_tick = r.start_tick;
        filled.push_back(idle);
      }
      filled.push_back(r);
      cursor = std::max(cursor, r.end_tick);
    }
    if (cursor < span_end) {
      TimetableRow idle;
      idle.resource = res;
      idle.chamber_id = chamber;
      idle.activity = TimetableActivity::Idle;
      idle.start_tick = cursor;
      idle.end_tick = span_end;
      filled.push_back(idle);
    }
    rows = std::move(filled);
  };

  fill_gaps(robot_rows, TimetableResource::Robot, -1);
  for (auto& [id, rows] : chamber_rows) fill_gaps(rows, TimetableResource::Chamber, id);

  tt.rows = std::move(robot_rows);
  for (auto& [id, rows] : chamber_rows)
    tt.rows.insert(tt.rows.end(), rows.begin(), rows.end());
  return tt;
}

std::string timetable_csv(const Timetable& tt, double tick_s) {
  std::ostringstream os;
  os << "resource,activity,start_s,end_s,glass_id\n";
  for (const TimetableRow& r : tt.rows) {
    if (r.resource == TimetableResource::Robot)
      os << "Robot";
    else
      os << "Chamber(" << r.chamber_id << ")";
    os << ',' << to_string(r.activity) << ',' << r.start_tick * tick_s << ','
       << r.end_tick * tick_s << ',' << r.glass_id << '\n';
  }
  return os.str();
}

std::string timetable_svg(const Timetable& tt, double tick_s) {
  // one horizontal band per resource, time on x
  std::vector<std::pair<TimetableResource, int>> resources;
  long long max_tick = 1;
  for (const TimetableRow& r : tt.rows) {
    std::pair<TimetableResource, int> key{r.resource, r.chamber_id};
    if (std::find(resources.begin(), resources.end(), key) == resources.end())
      resources.push_back(key);
    max_tick = std::max(max_tick, r.end_tick);
  }
  const double band_h = 28, gap = 8, left = 120, width = 900;
  const double scale = width / static_cast<double>(max_tick);
  const double height = resources.size() * (band_h + gap) + gap + 24;

  auto color = [](TimetableActivity a) {
    switch (a) {
      case TimetableActivity::Moving: return "#4e79a7";
      case TimetableActivity::Idle: return "#d8d8d8";
      case TimetableActivity::Process: return "#59a14f";
      case TimetableActivity::Load: return "#f28e2b";
      case TimetableActivity::Unload: return "#e15759";
    }
    return "#000000";
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + width + 20
     << "\" height=\"" << height << "\">\n";
  for (size_t i = 0; i < resources.size(); ++i) {
    double y = gap + i * (band_h + gap);
    std::string label = resources[i].first == TimetableResource::Robot
                            ? "Robot"
                            : "Chamber(" + std::to_string(resources[i].second) + ")";
    os << "  <text x=\"8\" y=\"" << y + band_h * 0.7 << "\" font-size=\"13\">" << label
       << "</text>\n";
    for (const TimetableRow& r : tt.rows) {
      if (r.resource != resources[i].first || r.chamber_id != resources[i].second) continue;
      double x = left + r.start_tick * scale;
      double w = std::max(0.5, (r.end_tick - r.start_tick) * scale);
      os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
         << band_h << "\" fill=\"" << color(r.activity) << "\"><title>" << to_string(r.activity)
         << " [" << r.start_tick * tick_s << "s, " << r.end_tick * tick_s << "s]"
         << (r.glass_id >= 0 ? " glass " + std::to_string(r.glass_id) : "")
         << "</title></rect>\n";
    }
  }
  os << "  <text x=\"" << left << "\" y=\"" << height - 6 << "\" font-size=\"12\">0 s</text>\n";
  os << "  <text x=\"" << left + width - 40 << "\" y=\"" << height - 6 << "\" font-size=\"12\">"
     << max_tick * tick_s << " s</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace gf
