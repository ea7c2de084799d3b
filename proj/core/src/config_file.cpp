#include "glassflow/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace gf {

namespace {

struct Field {
  std::function<void(FullConfig&, const std::string&)> set;
  std::function<std::string(const FullConfig&)> get;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> reg = [] {
    std::map<std::string, Field> r;
    auto addd = [&r](const std::string& key, auto accessor) {
      r[key] = Field{
          [key, accessor](FullConfig& c, const std::string& v) {
            accessor(c) = parse_double(key, v);
          },
          [accessor](const FullConfig& c) { return fmt(accessor(const_cast<FullConfig&>(c))); }};
    };
    auto addi = [&r](const std::string& key, auto accessor) {
      r[key] = Field{[key, accessor](FullConfig& c, const std::string& v) {
                       accessor(c) =
                           static_cast<std::decay_t<decltype(accessor(c))>>(parse_int(key, v));
                     },
                     [accessor](const FullConfig& c) {
                       return std::to_string(accessor(const_cast<FullConfig&>(c)));
                     }};
    };
    auto addb = [&r](const std::string& key, auto accessor) {
      r[key] = Field{
          [key, accessor](FullConfig& c, const std::string& v) {
            accessor(c) = parse_bool(key, v);
          },
          [accessor](const FullConfig& c) {
            return accessor(const_cast<FullConfig&>(c)) ? std::string("true")
                                                        : std::string("false");
          }};
    };

    // [physical]
    addd("physical.glass_scale_x", [](FullConfig& c) -> double& { return c.env.physical.glass_scale_x; });
    addd("physical.glass_scale_y", [](FullConfig& c) -> double& { return c.env.physical.glass_scale_y; });
    addd("physical.glass_scale_z", [](FullConfig& c) -> double& { return c.env.physical.glass_scale_z; });
    addd("physical.glass_mass", [](FullConfig& c) -> double& { return c.env.physical.glass_mass; });
    addd("physical.drag", [](FullConfig& c) -> double& { return c.env.physical.drag; });
    addd("physical.angular_drag", [](FullConfig& c) -> double& { return c.env.physical.angular_drag; });
    addb("physical.gravity_enabled", [](FullConfig& c) -> bool& { return c.env.physical.gravity_enabled; });
    addd("physical.dynamic_friction", [](FullConfig& c) -> double& { return c.env.physical.dynamic_friction; });
    addd("physical.static_friction", [](FullConfig& c) -> double& { return c.env.physical.static_friction; });
    addd("physical.transfer_speed", [](FullConfig& c) -> double& { return c.env.physical.transfer_speed; });
    addi("physical.process_time_ticks", [](FullConfig& c) -> int& { return c.env.physical.process_time_ticks; });
    addd("physical.arm_radius", [](FullConfig& c) -> double& { return c.env.physical.arm_radius; });
    addd("physical.gravity_accel", [](FullConfig& c) -> double& { return c.env.physical.gravity_accel; });

    // [process]
    addd("process.glass_input_interval_s", [](FullConfig& c) -> double& { return c.env.process.glass_input_interval_s; });
    addd("process.glass_size_mm_w", [](FullConfig& c) -> double& { return c.env.process.glass_size_mm_w; });
    addd("process.glass_size_mm_h", [](FullConfig& c) -> double& { return c.env.process.glass_size_mm_h; });
    addd("process.glass_weight", [](FullConfig& c) -> double& { return c.env.process.glass_weight; });
    addi("process.num_process_chambers", [](FullConfig& c) -> int& { return c.env.process.num_process_chambers; });
    addi("process.num_arms", [](FullConfig& c) -> int& { return c.env.process.num_arms; });
    addd("process.process_time_s", [](FullConfig& c) -> double& { return c.env.process.process_time_s; });
    addd("process.tick_duration_s", [](FullConfig& c) -> double& { return c.env.process.tick_duration_s; });
    r["process.chamber_placement"] = Field{
        [](FullConfig& c, const std::string& v) {
          if (v != "cluster") throw ConfigError("process.chamber_placement: unknown value '" + v + "'");
          c.env.process.chamber_placement = ChamberPlacement::Cluster;
        },
        [](const FullConfig&) { return std::string("cluster"); }};

    // [geometry]
    addd("geometry.layout_radius", [](FullConfig& c) -> double& { return c.env.geometry.layout_radius; });
    addi("geometry.arm_get_ticks", [](FullConfig& c) -> int& { return c.env.geometry.arm_get_ticks; });
    addi("geometry.arm_put_ticks", [](FullConfig& c) -> int& { return c.env.geometry.arm_put_ticks; });

    // [env]
    r["env.observation_mode"] = Field{
        [](FullConfig& c, const std::string& v) {
          if (v == "basic")
            c.env.observation_mode = ObservationMode::Basic;
          else if (v == "reduced")
            c.env.observation_mode = ObservationMode::Reduced;
          else
            throw ConfigError("env.observation_mode: must be 'basic' or 'reduced', got '" + v + "'");
        },
        [](const FullConfig& c) {
          return std::string(c.env.observation_mode == ObservationMode::Basic ? "basic"
                                                                              : "reduced");
        }};
    addd("env.reward_processed_arrival", [](FullConfig& c) -> double& { return c.env.rewards.processed_arrival; });
    addd("env.reward_time_penalty", [](FullConfig& c) -> double& { return c.env.rewards.time_penalty; });
    addd("env.reward_glass_dropped", [](FullConfig& c) -> double& { return c.env.rewards.glass_dropped; });
    addd("env.reward_glass_broken", [](FullConfig& c) -> double& { return c.env.rewards.glass_broken; });
    addd("env.reward_incomplete_arrival", [](FullConfig& c) -> double& { return c.env.rewards.incomplete_arrival; });
    addi("env.max_glasses_tracked", [](FullConfig& c) -> int& { return c.env.max_glasses_tracked; });
    addi("env.horizon", [](FullConfig& c) -> long long& { return c.env.horizon; });

    // [ppo]
    addi("ppo.batch_size", [](FullConfig& c) -> int& { return c.ppo.batch_size; });
    addi("ppo.buffer_size", [](FullConfig& c) -> int& { return c.ppo.buffer_size; });
    addd("ppo.clip_epsilon", [](FullConfig& c) -> double& { return c.ppo.clip_epsilon; });
    addd("ppo.gamma", [](FullConfig& c) -> double& { return c.ppo.gamma; });
    addd("ppo.gae_lambda", [](FullConfig& c) -> double& { return c.ppo.gae_lambda; });
    addd("ppo.learning_rate", [](FullConfig& c) -> double& { return c.ppo.learning_rate; });
    addi("ppo.max_steps", [](FullConfig& c) -> long long& { return c.ppo.max_steps; });
    addd("ppo.beta", [](FullConfig& c) -> double& { return c.ppo.beta; });
    addd("ppo.beta_eff", [](FullConfig& c) -> double& { return c.ppo.beta_eff; });
    addi("ppo.epochs_per_update", [](FullConfig& c) -> int& { return c.ppo.epochs_per_update; });
    addd("ppo.value_loss_coef", [](FullConfig& c) -> double& { return c.ppo.value_loss_coef; });
    addd("ppo.grad_norm_clip", [](FullConfig& c) -> double& { return c.ppo.grad_norm_clip; });
    addi("ppo.num_actors", [](FullConfig& c) -> int& { return c.ppo.num_actors; });
    addi("ppo.hidden_width", [](FullConfig& c) -> int& { return c.ppo.hidden_width; });
    addi("ppo.seed", [](FullConfig& c) -> std::uint64_t& { return c.ppo.seed; });
    return r;
  }();
  return reg;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void set_config_value(FullConfig& cfg, const std::string& key, const std::string& value) {
  const auto& reg = registry();
  auto it = reg.find(key);
  if (it == reg.end() && key.find('.') == std::string::npos) {
    // bare key: resolve across sections, must be unambiguous
    std::string found;
    for (const auto& [k, f] : reg) {
      if (k.substr(k.find('.') + 1) == key) {
        if (!found.empty()) throw ConfigError(key + ": ambiguous key, qualify with a section");
        found = k;
      }
    }
    if (!found.empty()) it = reg.find(found);
  }
  if (it == reg.end()) throw ConfigError("unknown configuration key: " + key);
  it->second.set(cfg, value);
}

bool is_ppo_key(const std::string& key) {
  if (key.rfind("ppo.", 0) == 0) return true;
  if (key.find('.') != std::string::npos) return false;
  return registry().count("ppo." + key) > 0;
}

FullConfig parse_config(const std::string& text) {
  FullConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      if (section != "physical" && section != "process" && section != "geometry" &&
          section != "env" && section != "ppo")
        throw ConfigError("unknown configuration section: [" + section + "]");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                        "' outside any section");
    set_config_value(cfg, section + "." + key, value);
  }
  return cfg;
}

FullConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> config_echo(const FullConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, f] : registry()) out[k] = f.get(cfg);
  return out;
}

std::string config_to_text(const FullConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const auto& [k, v] : config_echo(cfg)) {
    std::string section = k.substr(0, k.find('.'));
    if (section != current) {
      if (!current.empty()) os << '\n';
      os << '[' << section << "]\n";
      current = section;
    }
    os << k.substr(k.find('.') + 1) << " = " << v << '\n';
  }
  return os.str();
}

}  // namespace gf
