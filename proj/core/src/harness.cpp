#include "glassflow/harness.hpp"

#include <zlib.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glassflow/baseline.hpp"
#include "glassflow/tact.hpp"
#include "json.hpp"

namespace gf {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* kCodeVersion = "glassflow 0.1.0";

namespace {

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

double mean_completed_tact(const std::vector<Event>& log, double tick_s) {
  double sum = 0.0;
  long long n = 0;
  for (const Event& e : log) {
    if (e.kind != EventKind::GlassUnloaded) continue;
    if (auto t = measured_tact(log, e.glass_id, tick_s)) {
      sum += *t;
      n++;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

EvalReport drive(const FullConfig& cfg, long long episodes, long long horizon,
                 std::uint64_t seed, const std::function<int(const Env&)>& pick_action,
                 std::vector<Event>* event_log_out, std::vector<TraceRow>* trace_out) {
  EvalReport rep;
  rep.episodes = episodes;
  double reward_sum = 0.0;
  double tact_sum = 0.0;
  long long tact_n = 0;
  for (long long ep = 0; ep < episodes; ++ep) {
    Env env(cfg.env);
    env.reset(seed + static_cast<std::uint64_t>(ep));
    long long unloaded = 0, failed = 0;
    for (long long t = 0; t < horizon; ++t) {
      StepResult sr = env.step(pick_action(env));
      reward_sum += sr.reward;
      rep.steps++;
      for (const Event& e : sr.events) {
        if (e.kind == EventKind::GlassUnloaded && e.processed) {
          rep.successes++;
          unloaded++;
        }
        if (e.kind == EventKind::GlassUnloaded && !e.processed) {
          rep.incompletes++;
          failed++;
        }
        if (e.kind == EventKind::GlassDropped) {
          rep.drops++;
          failed++;
        }
        if (e.kind == EventKind::GlassBroken) {
          rep.breaks++;
          failed++;
        }
      }
      if (trace_out)
        trace_out->push_back({t, -1, sr.reward, sr.ticks_elapsed, unloaded, failed});
    }
    const std::vector<Event>& log = env.world().event_log;
    for (const Event& e : log) {
      if (e.kind != EventKind::GlassUnloaded || !e.processed) continue;
      if (auto tact = measured_tact(log, e.glass_id, cfg.env.process.tick_duration_s)) {
        tact_sum += *tact;
        tact_n++;
      }
    }
    if (event_log_out && ep == 0) *event_log_out = log;
  }
  rep.mean_reward_per_step = rep.steps > 0 ? reward_sum / rep.steps : 0.0;
  rep.mean_tact_s = tact_n > 0 ? tact_sum / tact_n : 0.0;
  return rep;
}

}  // namespace

EvalReport evaluate(const FullConfig& cfg, PolicySource source, const PolicyParams* params,
                    long long episodes, long long horizon, std::uint64_t seed,
                    std::vector<Event>* event_log_out, std::vector<TraceRow>* trace_out) {
  if (source == PolicySource::Baseline)
    return drive(cfg, episodes, horizon, seed,
                 [](const Env& env) { return baseline_action(env.world()); }, event_log_out,
                 trace_out);

  if (!params) throw std::invalid_argument("checkpoint evaluation needs policy parameters");
  {
    Env probe(cfg.env);
    if (params->input_dim != probe.observation_size())
      throw ConfigError("checkpoint observation width " + std::to_string(params->input_dim) +
                        " does not match config observation width " +
                        std::to_string(probe.observation_size()));
    if (params->num_actions != probe.action_count())
      throw ConfigError("checkpoint action count " + std::to_string(params->num_actions) +
                        " does not match config action count " +
                        std::to_string(probe.action_count()));
  }
  const PolicyParams& p = *params;
  return drive(cfg, episodes, horizon, seed,
               [&p](const Env& env) {
                 Eigen::VectorXd obs =
                     env.config().observation_mode == ObservationMode::Basic
                         ? observe_basic(env.world(), env.config().effective_slots())
                         : observe_reduced(env.world());
                 return argmax(policy_forward(p, obs).probabilities);
               },
               event_log_out, trace_out);
}

EvalReport run_baseline(const FullConfig& cfg, long long steps, std::uint64_t seed,
                        std::vector<Event>* event_log_out, std::vector<TraceRow>* trace_out) {
  return evaluate(cfg, PolicySource::Baseline, nullptr, 1, steps, seed, event_log_out,
                  trace_out);
}

SplitTestReport run_split_test(const FullConfig& base, const std::string& parameter,
                               const std::vector<std::string>& values,
                               const std::vector<std::uint64_t>& seeds, long long steps) {
  // validates the key up front
  {
    FullConfig probe = base;
    set_config_value(probe, parameter, values.empty() ? "0" : values.front());
  }

  SplitTestReport rep;
  rep.parameter = parameter;
  const bool trains = is_ppo_key(parameter);
  for (const std::string& value : values) {
    for (std::uint64_t seed : seeds) {
      FullConfig cfg = base;
      set_config_value(cfg, parameter, value);
      SplitCell cell;
      cell.parameter = parameter;
      cell.value = value;
      cell.seed = seed;
      if (trains) {
        cfg.ppo.seed = seed;
        Env env(cfg.env);
        TrainResult tr = train(env, cfg.ppo);
        EvalReport ev = evaluate(cfg, PolicySource::Checkpoint, &tr.params, 1,
                                 std::max<long long>(1, steps), seed + 10000);
        cell.throughput = ev.successes;
        cell.drops = ev.drops;
        cell.breaks = ev.breaks;
        cell.incompletes = ev.incompletes;
        cell.mean_reward = ev.mean_reward_per_step;
      } else {
        EvalReport ev = run_baseline(cfg, steps, seed);
        cell.throughput = ev.successes;
        cell.drops = ev.drops;
        cell.breaks = ev.breaks;
        cell.incompletes = ev.incompletes;
        cell.mean_reward = ev.mean_reward_per_step;
      }
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

std::string split_report_csv(const SplitTestReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "parameter,value,seed,throughput,drops,breaks,incompletes,mean_reward\n";
  for (const SplitCell& c : rep.cells) {
    os << c.parameter << ',' << c.value << ',' << c.seed << ',' << c.throughput << ','
       << c.drops << ',' << c.breaks << ',' << c.incompletes << ',' << c.mean_reward << '\n';
  }
  return os.str();
}

std::uint32_t file_crc32(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void write_manifest(const std::string& out_dir, const FullConfig& cfg,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& artifacts) {
  json j;
  j["code_version"] = kCodeVersion;
  j["seeds"] = seeds;
  j["config"] = config_echo(cfg);
  // record the nominal entropy coefficient next to the effective one
  j["config"]["ppo.beta"] = std::to_string(cfg.ppo.beta);
  auto now = std::chrono::system_clock::now().time_since_epoch();
  j["written_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  json arts = json::object();
  for (const std::string& a : artifacts) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", file_crc32((fs::path(out_dir) / a).string()));
    arts[a] = buf;
  }
  j["artifacts"] = arts;
  write_file((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

TrainResult train_run(const FullConfig& cfg_in, std::uint64_t seed, const std::string& out_dir) {
  FullConfig cfg = cfg_in;
  cfg.ppo.seed = seed;
  cfg.validate();
  fs::create_directories(out_dir);

  Env env(cfg.env);
  TrainResult res = train(env, cfg.ppo);

  write_file((fs::path(out_dir) / "metrics.csv").string(), metrics_csv(res.metrics));
  Checkpoint cp{res.params, cfg.ppo, res.train_steps, ""};
  save_checkpoint(cp, (fs::path(out_dir) / "checkpoint.bin").string());
  write_file((fs::path(out_dir) / "config.cfg").string(), config_to_text(cfg));
  write_manifest(out_dir, cfg, {seed}, {"metrics.csv", "checkpoint.bin", "config.cfg"});
  return res;
}

std::string eval_report_csv(const EvalReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "episodes,steps,successes,drops,breaks,incompletes,success_ratio,mean_reward_per_step,"
        "mean_tact_s\n";
  os << r.episodes << ',' << r.steps << ',' << r.successes << ',' << r.drops << ',' << r.breaks
     << ',' << r.incompletes << ',' << r.success_ratio() << ',' << r.mean_reward_per_step << ','
     << r.mean_tact_s << '\n';
  return os.str();
}

}  // namespace gf
