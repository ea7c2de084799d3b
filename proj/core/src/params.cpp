#include "glassflow/params.hpp"

namespace gf {

namespace {
void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(std::string(field) + ": " + what);
}
}  // namespace

void PhysicalParams::validate() const {
  require(glass_scale_x >= 0 && glass_scale_y >= 0 && glass_scale_z >= 0, "glass_scale",
          ">= 0 required");
  require(glass_mass >= 0, "glass_mass", ">= 0 required");
  require(drag >= 0, "drag", ">= 0 required");
  require(angular_drag >= 0, "angular_drag", ">= 0 required");
  require(dynamic_friction >= 0, "dynamic_friction", ">= 0 required");
  require(static_friction >= dynamic_friction, "static_friction",
          ">= dynamic_friction required");
  require(transfer_speed > 0, "transfer_speed", "> 0 required");
  require(process_time_ticks >= 1, "process_time_ticks", ">= 1 required");
  require(arm_radius > 0, "arm_radius", "> 0 required");
  require(gravity_accel >= 0, "gravity_accel", ">= 0 required");
}

void ProcessParams::validate() const {
  require(glass_input_interval_s > 0, "glass_input_interval_s", "> 0 required");
  require(glass_size_mm_w > 0 && glass_size_mm_h > 0, "glass_size_mm", "> 0 required");
  require(glass_weight >= 0, "glass_weight", ">= 0 required");
  require(num_process_chambers >= 0, "num_process_chambers", ">= 0 required");
  require(num_arms == 1 || num_arms == 2, "num_arms", "must be 1 or 2");
  require(process_time_s > 0, "process_time_s", "> 0 required");
  require(tick_duration_s > 0, "tick_duration_s", "> 0 required");
}

void GeometryParams::validate() const {
  require(layout_radius > 0, "layout_radius", "> 0 required");
  require(arm_get_ticks >= 1, "arm_get_ticks", ">= 1 required");
  require(arm_put_ticks >= 1, "arm_put_ticks", ">= 1 required");
}

double max_safe_rotation_speed(const PhysicalParams& p) {
  if (p.static_friction <= 0) return 0.0;
  return std::sqrt(p.static_friction * p.gravity_accel / p.arm_radius);
}

double max_safe_rotation_speed_per_tick(const PhysicalParams& p, double tick_duration_s) {
  return max_safe_rotation_speed(p) * tick_duration_s;
}

}  // namespace gf
