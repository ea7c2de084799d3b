#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "glassflow/harness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

gf::FullConfig tiny_config() {
  gf::FullConfig cfg;
  cfg.env.process.num_process_chambers = 1;
  cfg.env.process.num_arms = 1;
  cfg.ppo.buffer_size = 128;
  cfg.ppo.batch_size = 64;
  cfg.ppo.hidden_width = 16;
  cfg.ppo.max_steps = 256;
  cfg.ppo.learning_rate = 0.05;
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("success ratio floors its denominator at one failure") {
  gf::EvalReport r;
  r.successes = 40;
  CHECK(r.success_ratio() == 40.0);
  r.drops = 2;
  r.breaks = 1;
  r.incompletes = 1;
  CHECK(r.failures() == 4);
  CHECK(r.success_ratio() == 10.0);
}

TEST_CASE("baseline evaluation is reproducible and loss-free") {
  gf::FullConfig cfg = tiny_config();
  std::vector<gf::TraceRow> trace;
  gf::EvalReport a = gf::run_baseline(cfg, 3000, 7, nullptr, &trace);
  gf::EvalReport b = gf::run_baseline(cfg, 3000, 7);
  CHECK(a.successes == b.successes);
  CHECK(a.mean_reward_per_step == b.mean_reward_per_step);
  CHECK(a.drops == 0);
  CHECK(a.breaks == 0);
  CHECK(a.successes > 0);
  CHECK(a.mean_tact_s > 0.0);
  CHECK(trace.size() == 3000);
  CHECK(gf::eval_report_csv(a).find("successes") != std::string::npos);
}

TEST_CASE("evaluation rejects a checkpoint of the wrong shape") {
  gf::FullConfig cfg = tiny_config();
  gf::PolicyParams wrong = gf::init_policy(99, 8, 4, 0);
  CHECK_THROWS(gf::evaluate(cfg, gf::PolicySource::Checkpoint, &wrong, 1, 100, 0));
}

TEST_CASE("greedy evaluation of a fresh policy runs to the horizon") {
  gf::FullConfig cfg = tiny_config();
  gf::Env probe(cfg.env);
  gf::PolicyParams p =
      gf::init_policy(probe.observation_size(), 16, probe.action_count(), 4);
  gf::EvalReport r = gf::evaluate(cfg, gf::PolicySource::Checkpoint, &p, 2, 500, 11);
  CHECK(r.episodes == 2);
  CHECK(r.steps == 1000);
}

TEST_CASE("a physical split test sweeps values per seed") {
  gf::FullConfig cfg = tiny_config();
  std::vector<std::string> values = {"0.005", "0.02"};
  std::vector<std::uint64_t> seeds = {1, 2};
  gf::SplitTestReport rep =
      gf::run_split_test(cfg, "physical.transfer_speed", values, seeds, 1500);
  REQUIRE(rep.cells.size() == 4);
  for (const gf::SplitCell& c : rep.cells) CHECK(c.parameter == "physical.transfer_speed");

  // slow rotation keeps every glass; fast rotation drops whatever is carried
  for (const gf::SplitCell& c : rep.cells) {
    if (c.value == "0.005") {
      CHECK(c.drops == 0);
      CHECK(c.throughput > 0);
    } else {
      CHECK(c.drops > 0);
    }
  }

  // the report is value-order invariant cell by cell
  gf::SplitTestReport swapped =
      gf::run_split_test(cfg, "physical.transfer_speed", {"0.02", "0.005"}, seeds, 1500);
  for (const gf::SplitCell& c : rep.cells) {
    bool found = false;
    for (const gf::SplitCell& d : swapped.cells)
      if (d.value == c.value && d.seed == c.seed && d.throughput == c.throughput &&
          d.drops == c.drops)
        found = true;
    CHECK(found);
  }

  std::string csv = gf::split_report_csv(rep);
  CHECK(csv.find("transfer_speed") != std::string::npos);
  CHECK(csv.find("0.005") != std::string::npos);
}

TEST_CASE("training runs leave a complete, digest-consistent trail") {
  fs::path dir = fs::temp_directory_path() / "gf_harness_run";
  fs::remove_all(dir);
  gf::FullConfig cfg = tiny_config();
  gf::TrainResult res = gf::train_run(cfg, 5, dir.string());
  CHECK(res.train_steps == 256);

  REQUIRE(fs::exists(dir / "metrics.csv"));
  REQUIRE(fs::exists(dir / "checkpoint.bin"));
  REQUIRE(fs::exists(dir / "manifest.json"));

  // the checkpoint reloads to the trained parameters
  gf::Checkpoint cp = gf::load_checkpoint((dir / "checkpoint.bin").string());
  CHECK(cp.params.flatten() == res.params.flatten());
  CHECK(cp.train_steps == 256);

  // the manifest lists each artifact with a digest matching the file bytes
  nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  REQUIRE(manifest.contains("artifacts"));
  bool saw_checkpoint = false;
  for (const auto& [name, digest] : manifest["artifacts"].items()) {
    std::uint32_t crc = static_cast<std::uint32_t>(
        std::stoul(digest.get<std::string>(), nullptr, 16));
    CHECK(gf::file_crc32((dir / name).string()) == crc);
    if (name == "checkpoint.bin") saw_checkpoint = true;
  }
  CHECK(saw_checkpoint);
  CHECK(manifest.contains("config"));
  CHECK(manifest["config"].contains("ppo.learning_rate"));
  CHECK(manifest.contains("seeds"));
  CHECK(manifest.contains("code_version"));

  // byte-identical repetition under the same seed
  fs::path dir2 = fs::temp_directory_path() / "gf_harness_run2";
  fs::remove_all(dir2);
  gf::train_run(cfg, 5, dir2.string());
  CHECK(read_file(dir / "metrics.csv") == read_file(dir2 / "metrics.csv"));
  CHECK(read_file(dir / "checkpoint.bin") == read_file(dir2 / "checkpoint.bin"));

  fs::remove_all(dir);
  fs::remove_all(dir2);
}
