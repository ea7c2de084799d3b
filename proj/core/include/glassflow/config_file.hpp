#ifndef GLASSFLOW_CONFIG_FILE_HPP_
#define GLASSFLOW_CONFIG_FILE_HPP_

#include <map>
#include <string>

#include "glassflow/env.hpp"
#include "glassflow/ppo.hpp"

namespace gf {

// Everything a run needs, loaded from one sectioned key/value file with
// sections [physical] [process] [geometry] [env] [ppo]. Unknown sections or
// keys are errors naming the offender.
struct FullConfig {
  EnvConfig env;
  PpoConfig ppo;

  void validate() const {
    env.validate();
    ppo.validate();
  }
};

FullConfig parse_config(const std::string& text);
FullConfig load_config(const std::string& path);

// Applies one "section.key" (or bare "key", resolved across sections)
// override. Throws ConfigError for unknown keys or bad values.
void set_config_value(FullConfig& cfg, const std::string& key, const std::string& value);

// True if the key belongs to the [ppo] section (split tests train for these
// and run the baseline sweep otherwise).
bool is_ppo_key(const std::string& key);

// Flat section.key = value echo of a config, for manifests.
std::map<std::string, std::string> config_echo(const FullConfig& cfg);

std::string config_to_text(const FullConfig& cfg);

}  // namespace gf

#endif  // GLASSFLOW_CONFIG_FILE_HPP_
