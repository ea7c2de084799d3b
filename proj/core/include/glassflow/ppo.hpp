#ifndef GLASSFLOW_PPO_HPP_
#define GLASSFLOW_PPO_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "glassflow/env.hpp"

namespace gf {

// One feed-forward network: input -> hidden -> hidden -> output, tanh
// activations, linear output.
struct Mlp {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  Eigen::Index parameter_count() const;
};

// Actor (action logits) and critic (scalar value), double precision.
struct PolicyParams {
  Mlp actor;
  Mlp critic;
  int input_dim = 0;
  int hidden_width = 0;
  int num_actions = 0;

  Eigen::Index parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], seeded.
PolicyParams init_policy(int input_dim, int hidden_width, int num_actions,
                         std::uint64_t seed);

struct PpoConfig {
  int batch_size = 512;       // M
  int buffer_size = 8192;     // N * T
  double clip_epsilon = 0.2;  // eps
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double learning_rate = 3.0e-4;
  long long max_steps = 150000;
  double beta = 500.0;      // as configured; recorded verbatim in manifests
  double beta_eff = 5e-3;   // entropy coefficient actually applied
  int epochs_per_update = 4;  // K
  double value_loss_coef = 0.5;
  double grad_norm_clip = 0.5;
  int num_actors = 1;
  int hidden_width = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ForwardResult {
  Eigen::VectorXd probabilities;  // softmax over logits; strictly positive
  Eigen::VectorXd log_probabilities;
  double value = 0.0;
};

ForwardResult policy_forward(const PolicyParams& params, const Eigen::VectorXd& observation);

// Inverse-CDF sample, deterministic given the rng state.
int sample_action(const Eigen::VectorXd& probabilities, std::mt19937_64& rng);

// pi_new(a|s) / pi_old(a|s), computed in log space.
double probability_ratio(const PolicyParams& params, const PolicyParams& old_params,
                         const Eigen::VectorXd& observation, int action);

struct RolloutBuffer {
  Eigen::MatrixXd observations;       // size x dim
  Eigen::MatrixXd next_observations;  // s_{t+1}
  std::vector<int> actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd log_probs;  // at sampling time
  Eigen::VectorXd values;     // V(s_t) at sampling time
  double bootstrap_value = 0.0;
  Eigen::VectorXd advantages;  // present after compute_gae
  Eigen::VectorXd returns;
  int size = 0;

  // event tallies of the collected span
  long long successes = 0;
  long long drops = 0;
  long long breaks = 0;
  long long incompletes = 0;
};

RolloutBuffer collect_rollout(Env& env, const PolicyParams& params, int steps,
                              std::mt19937_64& rng);

// delta_t = r_t + gamma V(s_{t+1}) - V(s_t), A_t = sum (gamma lambda)^l
// delta_{t+l}, returns_t = A_t + V(s_t). Continuing task, no terminal
// masking; V(s_T) = bootstrap_value.
void compute_gae(RolloutBuffer& buffer, double gamma, double lambda);

struct Minibatch {
  Eigen::MatrixXd observations;
  std::vector<int> actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // raw; normalized inside the loss
  Eigen::VectorXd returns;
};

struct LossResult {
  double loss = 0.0;
  double clip_objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  Eigen::VectorXd gradient;  // flat, same layout as PolicyParams::flatten
};

// total loss = -L_clip + value_loss_coef * MSE(V, returns) - beta_eff *
// entropy, with advantages normalized per minibatch. Gradients are exact
// reverse-mode derivatives of the same expression.
LossResult ppo_loss(const PolicyParams& params, const Minibatch& batch, const PpoConfig& cfg,
                    bool with_gradient = true);

// K epochs over shuffled minibatches of size M; plain gradient descent with
// global norm clipping. Deterministic given rng state.
struct UpdateStats {
  double mean_loss = 0.0;
  double mean_entropy = 0.0;
};

UpdateStats update(PolicyParams& params, const RolloutBuffer& buffer, const PpoConfig& cfg,
                   std::mt19937_64& rng);

// Max relative error between analytic gradients and central finite
// differences on a subsample of at least min_samples parameters.
double gradient_check(const PolicyParams& params, const Minibatch& batch, const PpoConfig& cfg,
                      double h = 1e-5, int min_samples = 1000, std::uint64_t seed = 0);

// Checkpoint file: magic "GFPC", u32 format version, u32 config length +
// UTF-8 JSON config echo, u64 training-step counter, u64 weight count, raw
// little-endian f64 weights, trailing CRC32 of everything before it.
struct Checkpoint {
  PolicyParams params;
  PpoConfig config;
  long long train_steps = 0;
  std::string config_json;
};

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Training metrics row; CSV columns: iteration, env_steps, mean_reward,
// success_count, drop_count, break_count, loss, entropy.
struct MetricsRow {
  long long iteration = 0;
  long long env_steps = 0;
  double mean_reward = 0.0;
  long long success_count = 0;
  long long drop_count = 0;
  long long break_count = 0;
  double loss = 0.0;
  double entropy = 0.0;
};

std::string metrics_csv(const std::vector<MetricsRow>& rows);

// Full training loop: iterations of collect / GAE / update until max_steps
// env macro-steps. The environment is reset at each iteration boundary from
// a seed derived from (seed, iteration), so a run resumed from a checkpoint
// written at a boundary reproduces the uninterrupted run. Deterministic
// given (seed, config).
struct TrainResult {
  PolicyParams params;
  std::vector<MetricsRow> metrics;
  long long train_steps = 0;
};

using IterationCallback = std::function<void(const MetricsRow&, const PolicyParams&)>;

TrainResult train(Env& env, const PpoConfig& cfg, const IterationCallback& on_iteration = {},
                  const PolicyParams* resume_from = nullptr, long long resume_steps = 0);

}  // namespace gf

#endif  // GLASSFLOW_PPO_HPP_
