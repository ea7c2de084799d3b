#ifndef GLASSFLOW_PARAMS_HPP_
#define GLASSFLOW_PARAMS_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gf {

// Raised when a configuration value is out of range. The message names the
// offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Physical properties of the glass and the transfer robot. Mass, drag and
// scale are carried through configs and run manifests but only friction,
// gravity and arm radius enter the kinematic update (via the safe-rotation
// bound); the rest are recorded for fidelity work.
struct PhysicalParams {
  double glass_scale_x = 1.0;
  double glass_scale_y = 0.01;
  double glass_scale_z = 1.0;
  double glass_mass = 500.0;
  double drag = 0.0;
  double angular_drag = 0.05;
  bool gravity_enabled = true;
  double dynamic_friction = 0.6;
  double static_friction = 0.6;
  // Robot rotation speed in radians per tick.
  double transfer_speed = 0.01;
  int process_time_ticks = 300;
  // Radius at which a carried glass rides, in length units. The default is
  // calibrated so the safe rotation speed works out to exactly 0.01 rad/tick
  // at a 0.1 s tick.
  double arm_radius = 588.6;
  // Gravitational acceleration in length units per second^2.
  double gravity_accel = 9.81;

  void validate() const;
};

enum class ChamberPlacement { Cluster };

// Process-level parameters (the recipe side of a run).
struct ProcessParams {
  double glass_input_interval_s = 20.0;
  double glass_size_mm_w = 1000.0;
  double glass_size_mm_h = 1000.0;
  double glass_weight = 500.0;
  int num_process_chambers = 3;  // K
  ChamberPlacement chamber_placement = ChamberPlacement::Cluster;
  int num_arms = 2;
  double process_time_s = 30.0;
  double tick_duration_s = 0.1;

  void validate() const;

  // Seconds -> integer ticks, rounding half up.
  long long to_ticks(double seconds) const {
    return static_cast<long long>(std::floor(seconds / tick_duration_s + 0.5));
  }
  long long input_interval_ticks() const { return to_ticks(glass_input_interval_s); }
  long long process_time_ticks() const { return to_ticks(process_time_s); }
  int total_chambers() const { return num_process_chambers + 2; }
};

// Layout constants, all artifact conventions: chambers sit on a circle of
// layout_radius around the robot, and arm load/unload are fixed-duration
// sequences.
struct GeometryParams {
  double layout_radius = 1.0;
  int arm_get_ticks = 10;  // full pick-up sequence: extend, lift, retract
  int arm_put_ticks = 10;  // full put-down sequence

  void validate() const;
};

// Largest angular speed (radians per second) at which a carried glass is
// retained: the static-friction circular-motion bound sqrt(mu_s * g / r).
double max_safe_rotation_speed(const PhysicalParams& p);

// Same bound converted to radians per tick.
double max_safe_rotation_speed_per_tick(const PhysicalParams& p, double tick_duration_s);

}  // namespace gf

#endif  // GLASSFLOW_PARAMS_HPP_
