#include <benchmark/benchmark.h>

#include "glassflow/baseline.hpp"
#include "glassflow/env.hpp"
#include "glassflow/ppo.hpp"

namespace {

gf::EnvConfig small_env() {
  gf::EnvConfig cfg;
  cfg.process.num_process_chambers = 3;
  cfg.process.num_arms = 2;
  return cfg;
}

void BM_WorldTick(benchmark::State& state) {
  gf::EnvConfig cfg = small_env();
  gf::WorldState world = gf::build_world(cfg.process, cfg.physical, cfg.geometry, 1);
  gf::issue_command(world, gf::Command::rotate_to(1));
  for (auto _ : state) {
    gf::tick(world);
    benchmark::DoNotOptimize(world.tick);
  }
}
BENCHMARK(BM_WorldTick);

void BM_EnvMacroStepBaseline(benchmark::State& state) {
  gf::EnvConfig cfg = small_env();
  gf::Env env(cfg);
  env.reset(7);
  for (auto _ : state) {
    int a = gf::baseline_action(env.world());
    auto res = env.step(a);
    benchmark::DoNotOptimize(res.reward);
  }
}
BENCHMARK(BM_EnvMacroStepBaseline);

void BM_ObserveBasic(benchmark::State& state) {
  gf::EnvConfig cfg = small_env();
  cfg.observation_mode = gf::ObservationMode::Basic;
  gf::Env env(cfg);
  env.reset(7);
  for (auto _ : state) {
    Eigen::VectorXd obs = gf::observe_basic(env.world(), cfg.effective_slots());
    benchmark::DoNotOptimize(obs.sum());
  }
}
BENCHMARK(BM_ObserveBasic);

void BM_PolicyForward(benchmark::State& state) {
  gf::EnvConfig ecfg = small_env();
  gf::PpoConfig pcfg;
  gf::Env env(ecfg);
  gf::PolicyParams params =
      gf::init_policy(env.observation_size(), pcfg.hidden_width, env.action_count(), 42);
  Eigen::VectorXd x = Eigen::VectorXd::Random(env.observation_size());
  for (auto _ : state) {
    auto fwd = gf::policy_forward(params, x);
    benchmark::DoNotOptimize(fwd.value);
  }
}
BENCHMARK(BM_PolicyForward);

void BM_Gae(benchmark::State& state) {
  const int n = 8192;
  gf::RolloutBuffer buf;
  buf.size = n;
  buf.rewards = Eigen::VectorXd::Constant(n, 0.5);
  buf.values = Eigen::VectorXd::Constant(n, 1.0);
  buf.bootstrap_value = 0.7;
  for (auto _ : state) {
    gf::compute_gae(buf, 0.99, 0.95);
    benchmark::DoNotOptimize(buf.advantages.data());
  }
}
BENCHMARK(BM_Gae);

}  // namespace

BENCHMARK_MAIN();
