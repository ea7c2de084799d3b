#ifndef GLASSFLOW_BASELINE_HPP_
#define GLASSFLOW_BASELINE_HPP_

#include <span>
#include <vector>

#include "glassflow/world.hpp"

namespace gf {

// In/out signal raised by a chamber, as on real sites: occupied chambers
// request their glass taken out, empty ones report readiness for input.
struct Signal {
  int chamber_id = -1;
  bool out_request = false;  // false -> InReady
  ChamberGlassState glass_state = ChamberGlassState::Empty;  // OutRequest only
  long long age_ticks = 0;
};

std::vector<Signal> collect_signals(const WorldState& world);

// Rule-based return logic: among all feasible move chains (pick a glass up
// and put it somewhere allowed by the Loader -> Process -> Unloader
// sequence), executes the first primitive action of the chain with the
// smallest estimated completion ticks. Ties break by oldest signal, then
// lowest chamber id. Returns an env action id; Wait when nothing is
// feasible. Pure function of the world state.
int baseline_action(const WorldState& world);

}  // namespace gf

#endif  // GLASSFLOW_BASELINE_HPP_
