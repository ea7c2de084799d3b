#include <string>

#include "doctest.h"
#include "glassflow/config_file.hpp"

using doctest::Contains;

TEST_CASE("a sectioned file parses into typed fields") {
  std::string text =
      "# line comment\n"
      "[process]\n"
      "num_process_chambers = 3\n"
      "num_arms = 2\n"
      "; full-line comments use either marker\n"
      "glass_input_interval_s = 20.0\n"
      "\n"
      "[env]\n"
      "observation_mode = basic\n"
      "horizon = 5000\n"
      "[ppo]\n"
      "learning_rate = 0.05\n"
      "seed = 9\n";
  gf::FullConfig cfg = gf::parse_config(text);
  CHECK(cfg.env.process.num_process_chambers == 3);
  CHECK(cfg.env.process.num_arms == 2);
  CHECK(cfg.env.process.glass_input_interval_s == 20.0);
  CHECK(cfg.env.observation_mode == gf::ObservationMode::Basic);
  CHECK(cfg.env.horizon == 5000);
  CHECK(cfg.ppo.learning_rate == 0.05);
  CHECK(cfg.ppo.seed == 9);
  // untouched fields keep their defaults
  CHECK(cfg.ppo.clip_epsilon == 0.2);
  CHECK(cfg.env.process.tick_duration_s == 0.1);
}

TEST_CASE("parse errors name the offender") {
  CHECK_THROWS_WITH_AS(gf::parse_config("[nowhere]\n"),
                       Contains("unknown configuration section"), gf::ConfigError);
  CHECK_THROWS_WITH_AS(gf::parse_config("[ppo]\nwarp_factor = 9\n"),
                       Contains("warp_factor"), gf::ConfigError);
  CHECK_THROWS_WITH_AS(gf::parse_config("[ppo]\nlearning_rate 0.1\n"),
                       Contains("line 2"), gf::ConfigError);
  CHECK_THROWS_WITH_AS(gf::parse_config("[ppo]\nlearning_rate = fast\n"),
                       Contains("not a number"), gf::ConfigError);
  CHECK_THROWS_WITH_AS(gf::parse_config("[ppo]\nbatch_size = 2.5\n"),
                       Contains("not an integer"), gf::ConfigError);
}

TEST_CASE("overrides accept qualified keys and unique bare keys") {
  gf::FullConfig cfg;
  gf::set_config_value(cfg, "ppo.gamma", "0.5");
  CHECK(cfg.ppo.gamma == 0.5);
  gf::set_config_value(cfg, "learning_rate", "0.3");  // unique across sections
  CHECK(cfg.ppo.learning_rate == 0.3);
  gf::set_config_value(cfg, "process.num_arms", "1");
  CHECK(cfg.env.process.num_arms == 1);

  // "seed" exists only in [ppo]; a made-up key does not exist at all
  CHECK_THROWS_WITH_AS(gf::set_config_value(cfg, "flux", "1"),
                       Contains("unknown configuration key"), gf::ConfigError);
  CHECK_THROWS_WITH_AS(gf::set_config_value(cfg, "ppo.gamma", "waves"),
                       Contains("not a number"), gf::ConfigError);
}

TEST_CASE("ppo keys are distinguished for split tests") {
  CHECK(gf::is_ppo_key("gamma"));
  CHECK(gf::is_ppo_key("learning_rate"));
  CHECK(!gf::is_ppo_key("transfer_speed"));
  CHECK(!gf::is_ppo_key("num_arms"));
  CHECK(!gf::is_ppo_key("made_up"));
}

TEST_CASE("a config survives a text round-trip") {
  gf::FullConfig cfg;
  cfg.env.process.num_process_chambers = 4;
  cfg.env.process.num_arms = 2;
  cfg.env.physical.transfer_speed = 0.0075;
  cfg.env.observation_mode = gf::ObservationMode::Basic;
  cfg.ppo.learning_rate = 0.3;
  cfg.ppo.gamma = 0.01;
  cfg.ppo.seed = 1234;

  gf::FullConfig rt = gf::parse_config(gf::config_to_text(cfg));
  CHECK(gf::config_echo(rt) == gf::config_echo(cfg));
  CHECK(rt.env.physical.transfer_speed == 0.0075);
  CHECK(rt.ppo.seed == 1234);
}

TEST_CASE("the echo is flat section-qualified keys") {
  gf::FullConfig cfg;
  std::map<std::string, std::string> echo = gf::config_echo(cfg);
  CHECK(echo.count("ppo.learning_rate") == 1);
  CHECK(echo.count("process.num_arms") == 1);
  CHECK(echo.count("physical.transfer_speed") == 1);
  CHECK(echo.count("env.observation_mode") == 1);
}
