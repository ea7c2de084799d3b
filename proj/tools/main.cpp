// Command-line front end: train / evaluate / baseline-run / split-test / gantt.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "glassflow/baseline.hpp"
#include "glassflow/harness.hpp"
#include "glassflow/tact.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::string default_out_dir(std::uint64_t seed) {
  auto now = std::chrono::system_clock::now().time_since_epoch();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  return "runs/" + std::to_string(ms) + "-seed" + std::to_string(seed);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

gf::FullConfig load_with_overrides(const std::string& path,
                                   const std::vector<std::string>& sets) {
  gf::FullConfig cfg = gf::load_config(path);
  for (const std::string& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw gf::ConfigError("--set expects key=value, got '" + kv + "'");
    gf::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glassflow: FAB unit-process simulator, PPO trainer and baselines"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint_path, events_path, param, values_str, seeds_str;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  long long episodes = 1, horizon = 20000, steps = 20000;
  double tick_s = 0.1;
  bool use_baseline = false;

  auto* train_cmd = app.add_subcommand("train", "train a PPO policy");
  train_cmd->add_option("--config", config_path, "config file")->required();
  train_cmd->add_option("--seed", seed, "training seed")->required();
  train_cmd->add_option("--out", out_dir, "output directory");
  train_cmd->add_option("--set", sets, "override config values (section.key=value)");

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint or the baseline");
  eval_cmd->add_option("--config", config_path, "config file")->required();
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint to evaluate");
  eval_cmd->add_flag("--baseline", use_baseline, "evaluate the heuristic baseline");
  eval_cmd->add_option("--episodes", episodes, "evaluation episodes");
  eval_cmd->add_option("--horizon", horizon, "macro-steps per episode");
  eval_cmd->add_option("--seed", seed, "evaluation seed");
  eval_cmd->add_option("--out", out_dir, "output directory (trace, events, report)");
  eval_cmd->add_option("--set", sets, "override config values");

  auto* base_cmd = app.add_subcommand("baseline-run", "run the heuristic dispatcher");
  base_cmd->add_option("--config", config_path, "config file")->required();
  base_cmd->add_option("--steps", steps, "macro-steps to run");
  base_cmd->add_option("--seed", seed, "world seed");
  base_cmd->add_option("--out", out_dir, "output directory");
  base_cmd->add_option("--set", sets, "override config values");

  auto* split_cmd = app.add_subcommand("split-test", "sweep one parameter");
  split_cmd->add_option("--config", config_path, "config file")->required();
  split_cmd->add_option("--param", param, "config key to sweep")->required();
  split_cmd->add_option("--values", values_str, "comma-separated values")->required();
  split_cmd->add_option("--seeds", seeds_str, "comma-separated seeds")->required();
  split_cmd->add_option("--steps", steps, "macro-steps per cell");
  split_cmd->add_option("--out", out_dir, "output directory");
  split_cmd->add_option("--set", sets, "override config values");

  auto* gantt_cmd = app.add_subcommand("gantt", "timetable + SVG from an event log CSV");
  gantt_cmd->add_option("--events", events_path, "event log CSV")->required();
  gantt_cmd->add_option("--tick", tick_s, "tick duration in seconds");
  gantt_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      gf::FullConfig cfg = load_with_overrides(config_path, sets);
      if (out_dir.empty()) out_dir = default_out_dir(seed);
      gf::TrainResult res = gf::train_run(cfg, seed, out_dir);
      std::cout << "trained " << res.train_steps << " steps; artifacts in " << out_dir << "\n";
    } else if (*eval_cmd) {
      gf::FullConfig cfg = load_with_overrides(config_path, sets);
      if (use_baseline ? !checkpoint_path.empty() : checkpoint_path.empty())
        throw gf::ConfigError("evaluate: give exactly one of --checkpoint or --baseline");
      std::vector<gf::Event> log;
      std::vector<gf::TraceRow> trace;
      gf::EvalReport rep;
      if (use_baseline) {
        rep = gf::evaluate(cfg, gf::PolicySource::Baseline, nullptr, episodes, horizon, seed,
                           &log, &trace);
      } else {
        gf::Checkpoint cp = gf::load_checkpoint(checkpoint_path);
        rep = gf::evaluate(cfg, gf::PolicySource::Checkpoint, &cp.params, episodes, horizon,
                           seed, &log, &trace);
      }
      std::cout << gf::eval_report_csv(rep);
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(out_dir + "/report.csv", gf::eval_report_csv(rep));
        write_file(out_dir + "/trace.csv", gf::trace_csv(trace));
        write_file(out_dir + "/events.csv", gf::event_log_csv(log));
        gf::write_manifest(out_dir, cfg, {seed}, {"report.csv", "trace.csv", "events.csv"});
      }
    } else if (*base_cmd) {
      gf::FullConfig cfg = load_with_overrides(config_path, sets);
      if (out_dir.empty()) out_dir = default_out_dir(seed);
      fs::create_directories(out_dir);
      std::vector<gf::Event> log;
      std::vector<gf::TraceRow> trace;
      gf::EvalReport rep = gf::run_baseline(cfg, steps, seed, &log, &trace);
      gf::Timetable tt = gf::build_timetable(log);
      write_file(out_dir + "/report.csv", gf::eval_report_csv(rep));
      write_file(out_dir + "/trace.csv", gf::trace_csv(trace));
      write_file(out_dir + "/events.csv", gf::event_log_csv(log));
      write_file(out_dir + "/timetable.csv",
                 gf::timetable_csv(tt, cfg.env.process.tick_duration_s));
      write_file(out_dir + "/gantt.svg", gf::timetable_svg(tt, cfg.env.process.tick_duration_s));
      gf::write_manifest(out_dir, cfg, {seed},
                         {"report.csv", "trace.csv", "events.csv", "timetable.csv", "gantt.svg"});
      std::cout << gf::eval_report_csv(rep) << "artifacts in " << out_dir << "\n";
    } else if (*split_cmd) {
      gf::FullConfig cfg = load_with_overrides(config_path, sets);
      std::vector<std::uint64_t> seeds;
      for (const std::string& s : split_list(seeds_str)) seeds.push_back(std::stoull(s));
      gf::SplitTestReport rep =
          gf::run_split_test(cfg, param, split_list(values_str), seeds, steps);
      std::string csv = gf::split_report_csv(rep);
      std::cout << csv;
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(out_dir + "/split_test.csv", csv);
        gf::write_manifest(out_dir, cfg, seeds, {"split_test.csv"});
      }
    } else if (*gantt_cmd) {
      std::ifstream f(events_path);
      if (!f) throw std::runtime_error("cannot open " + events_path);
      std::stringstream ss;
      ss << f.rdbuf();
      std::vector<gf::Event> log = gf::parse_event_log_csv(ss.str());
      gf::Timetable tt = gf::build_timetable(log);
      if (out_dir.empty()) out_dir = ".";
      fs::create_directories(out_dir);
      write_file(out_dir + "/timetable.csv", gf::timetable_csv(tt, tick_s));
      write_file(out_dir + "/gantt.svg", gf::timetable_svg(tt, tick_s));
      std::cout << "wrote " << out_dir << "/timetable.csv and " << out_dir << "/gantt.svg\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
