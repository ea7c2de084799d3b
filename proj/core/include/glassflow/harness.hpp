#ifndef GLASSFLOW_HARNESS_HPP_
#define GLASSFLOW_HARNESS_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "glassflow/config_file.hpp"
#include "glassflow/ppo.hpp"

namespace gf {

// Aggregate results of a greedy (or baseline) evaluation.
struct EvalReport {
  long long episodes = 0;
  long long steps = 0;
  long long successes = 0;
  long long drops = 0;
  long long breaks = 0;
  long long incompletes = 0;
  double mean_reward_per_step = 0.0;
  double mean_tact_s = 0.0;  // over glasses that completed

  long long failures() const { return drops + breaks + incompletes; }
  // successes : failures, with the denominator floored at one failure
  double success_ratio() const {
    return static_cast<double>(successes) / static_cast<double>(std::max(1LL, failures()));
  }
};

enum class PolicySource { Checkpoint, Baseline };

// Greedy (argmax) rollouts for checkpoints, rule-based for the baseline.
// Throws on checkpoint/config dimension mismatch.
EvalReport evaluate(const FullConfig& cfg, PolicySource source, const PolicyParams* params,
                    long long episodes, long long horizon, std::uint64_t seed,
                    std::vector<Event>* event_log_out = nullptr,
                    std::vector<TraceRow>* trace_out = nullptr);

// Runs the baseline dispatcher for `steps` macro-steps on a fresh world.
EvalReport run_baseline(const FullConfig& cfg, long long steps, std::uint64_t seed,
                        std::vector<Event>* event_log_out = nullptr,
                        std::vector<TraceRow>* trace_out = nullptr);

struct SplitCell {
  std::string parameter;
  std::string value;
  std::uint64_t seed = 0;
  long long throughput = 0;  // processed arrivals
  long long drops = 0;
  long long breaks = 0;
  long long incompletes = 0;
  double mean_reward = 0.0;
};

struct SplitTestReport {
  std::string parameter;
  std::vector<SplitCell> cells;  // one row per (value, seed)
};

// Sweeps one parameter: baseline simulation for physical/process/geometry
// keys, full training plus greedy evaluation for [ppo] keys.
SplitTestReport run_split_test(const FullConfig& base, const std::string& parameter,
                               const std::vector<std::string>& values,
                               const std::vector<std::uint64_t>& seeds, long long steps);

std::string split_report_csv(const SplitTestReport& report);

// Training front end: trains, then writes metrics.csv, checkpoint.bin and
// manifest.json under out_dir. Returns the result for further use.
TrainResult train_run(const FullConfig& cfg, std::uint64_t seed, const std::string& out_dir);

// Writes a manifest.json naming every artifact of the run with a CRC32
// digest, the full config echo, seeds, code version and timestamps.
void write_manifest(const std::string& out_dir, const FullConfig& cfg,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& artifacts);

std::uint32_t file_crc32(const std::string& path);

std::string eval_report_csv(const EvalReport& r);

extern const char* kCodeVersion;

}  // namespace gf

#endif  // GLASSFLOW_HARNESS_HPP_
