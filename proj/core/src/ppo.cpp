#include "glassflow/ppo.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace gf {

namespace {

using json = nlohmann::json;

struct MlpCache {
  Eigen::VectorXd x, a1, h1, a2, h2, out;
};

void mlp_forward(const Mlp& m, const Eigen::VectorXd& x, MlpCache& c) {
  c.x = x;
  c.a1 = m.w1 * x + m.b1;
  c.h1 = c.a1.array().tanh();
  c.a2 = m.w2 * c.h1 + m.b2;
  c.h2 = c.a2.array().tanh();
  c.out = m.w3 * c.h2 + m.b3;
}

// Accumulates gradients for one sample given d(loss)/d(output).
void mlp_backward(const Mlp& m, const MlpCache& c, const Eigen::VectorXd& dout, Mlp& grad) {
  grad.w3 += dout * c.h2.transpose();
  grad.b3 += dout;
  Eigen::VectorXd dh2 = m.w3.transpose() * dout;
  Eigen::VectorXd da2 = dh2.array() * (1.0 - c.h2.array().square());
  grad.w2 += da2 * c.h1.transpose();
  grad.b2 += da2;
  Eigen::VectorXd dh1 = m.w2.transpose() * da2;
  Eigen::VectorXd da1 = dh1.array() * (1.0 - c.h1.array().square());
  grad.w1 += da1 * c.x.transpose();
  grad.b1 += da1;
}

Mlp zeros_like(const Mlp& m) {
  Mlp g;
  g.w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
  g.w2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
  g.w3 = Eigen::MatrixXd::Zero(m.w3.rows(), m.w3.cols());
  g.b1 = Eigen::VectorXd::Zero(m.b1.size());
  g.b2 = Eigen::VectorXd::Zero(m.b2.size());
  g.b3 = Eigen::VectorXd::Zero(m.b3.size());
  return g;
}

void softmax_from_logits(const Eigen::VectorXd& z, Eigen::VectorXd& probs,
                         Eigen::VectorXd& logp) {
  double zmax = z.maxCoeff();
  Eigen::VectorXd shifted = z.array() - zmax;
  Eigen::VectorXd ex = shifted.array().exp();
  double sum = ex.sum();
  probs = ex / sum;
  logp = shifted.array() - std::log(sum);
}

Eigen::VectorXd flatten_mlps(const Mlp& a, const Mlp& c, Eigen::Index n) {
  Eigen::VectorXd out(n);
  Eigen::Index i = 0;
  for (const Mlp* m : {&a, &c}) {
    for (const Eigen::MatrixXd* w : {&m->w1, &m->w2, &m->w3}) {
      std::memcpy(out.data() + i, w->data(), sizeof(double) * w->size());
      i += w->size();
    }
    // biases interleaved after their weight matrices would complicate the
    // block loop; keep the w1,w2,w3,b1,b2,b3 order per net
    for (const Eigen::VectorXd* b : {&m->b1, &m->b2, &m->b3}) {
      std::memcpy(out.data() + i, b->data(), sizeof(double) * b->size());
      i += b->size();
    }
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 8);
}

std::uint32_t read_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

json config_to_json(const PpoConfig& c) {
  return json{{"batch_size", c.batch_size},
              {"buffer_size", c.buffer_size},
              {"clip_epsilon", c.clip_epsilon},
              {"gamma", c.gamma},
              {"gae_lambda", c.gae_lambda},
              {"learning_rate", c.learning_rate},
              {"max_steps", c.max_steps},
              {"beta", c.beta},
              {"beta_eff", c.beta_eff},
              {"epochs_per_update", c.epochs_per_update},
              {"value_loss_coef", c.value_loss_coef},
              {"grad_norm_clip", c.grad_norm_clip},
              {"num_actors", c.num_actors},
              {"hidden_width", c.hidden_width},
              {"seed", c.seed}};
}

PpoConfig config_from_json(const json& j) {
  PpoConfig c;
  c.batch_size = j.at("batch_size");
  c.buffer_size = j.at("buffer_size");
  c.clip_epsilon = j.at("clip_epsilon");
  c.gamma = j.at("gamma");
  c.gae_lambda = j.at("gae_lambda");
  c.learning_rate = j.at("learning_rate");
  c.max_steps = j.at("max_steps");
  c.beta = j.at("beta");
  c.beta_eff = j.at("beta_eff");
  c.epochs_per_update = j.at("epochs_per_update");
  c.value_loss_coef = j.at("value_loss_coef");
  c.grad_norm_clip = j.at("grad_norm_clip");
  c.num_actors = j.at("num_actors");
  c.hidden_width = j.at("hidden_width");
  c.seed = j.at("seed");
  return c;
}

}  // namespace

void PpoConfig::validate() const {
  if (!(gamma > 0 && gamma <= 1)) throw ConfigError("gamma: in (0, 1] required");
  if (!(gae_lambda >= 0 && gae_lambda <= 1)) throw ConfigError("gae_lambda: in [0, 1] required");
  if (clip_epsilon <= 0) throw ConfigError("clip_epsilon: > 0 required");
  if (batch_size < 1 || batch_size > buffer_size)
    throw ConfigError("batch_size: 1 <= M <= buffer_size required");
  if (learning_rate < 0) throw ConfigError("learning_rate: >= 0 required");
  if (epochs_per_update < 1) throw ConfigError("epochs_per_update: >= 1 required");
  if (hidden_width < 1) throw ConfigError("hidden_width: >= 1 required");
  if (num_actors < 1) throw ConfigError("num_actors: >= 1 required");
}

Eigen::Index Mlp::parameter_count() const {
  return w1.size() + w2.size() + w3.size() + b1.size() + b2.size() + b3.size();
}

Eigen::Index PolicyParams::parameter_count() const {
  return actor.parameter_count() + critic.parameter_count();
}

Eigen::VectorXd PolicyParams::flatten() const {
  return flatten_mlps(actor, critic, parameter_count());
}

void PolicyParams::unflatten(const Eigen::VectorXd& flat) {
  Eigen::Index i = 0;
  for (Mlp* m : {&actor, &critic}) {
    for (Eigen::MatrixXd* w : {&m->w1, &m->w2, &m->w3}) {
      std::memcpy(w->data(), flat.data() + i, sizeof(double) * w->size());
      i += w->size();
    }
    for (Eigen::VectorXd* b : {&m->b1, &m->b2, &m->b3}) {
      std::memcpy(b->data(), flat.data() + i, sizeof(double) * b->size());
      i += b->size();
    }
  }
}

PolicyParams init_policy(int input_dim, int hidden, int num_actions, std::uint64_t seed) {
  PolicyParams p;
  p.input_dim = input_dim;
  p.hidden_width = hidden;
  p.num_actions = num_actions;
  std::mt19937_64 rng(seed);
  auto init = [&](Eigen::MatrixXd& m, int rows, int cols, int fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> d(-bound, bound);
    m.resize(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = d(rng);
  };
  auto init_net = [&](Mlp& m, int out_dim) {
    init(m.w1, hidden, input_dim, input_dim);
    m.b1 = Eigen::VectorXd::Zero(hidden);
    init(m.w2, hidden, hidden, hidden);
    m.b2 = Eigen::VectorXd::Zero(hidden);
    init(m.w3, out_dim, hidden, hidden);
    m.b3 = Eigen::VectorXd::Zero(out_dim);
  };
  init_net(p.actor, num_actions);
  init_net(p.critic, 1);
  return p;
}

ForwardResult policy_forward(const PolicyParams& p, const Eigen::VectorXd& obs) {
  if (obs.size() != p.actor.w1.cols())
    throw std::invalid_argument("observation length does not match policy input width");
  MlpCache ca, cc;
  mlp_forward(p.actor, obs, ca);
  mlp_forward(p.critic, obs, cc);
  ForwardResult r;
  softmax_from_logits(ca.out, r.probabilities, r.log_probabilities);
  r.value = cc.out[0];
  return r;
}

int sample_action(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double u = d(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

double probability_ratio(const PolicyParams& p, const PolicyParams& old_p,
                         const Eigen::VectorXd& obs, int action) {
  double lp_new = policy_forward(p, obs).log_probabilities[action];
  double lp_old = policy_forward(old_p, obs).log_probabilities[action];
  return std::exp(lp_new - lp_old);
}

RolloutBuffer collect_rollout(Env& env, const PolicyParams& params, int steps,
                              std::mt19937_64& rng) {
  RolloutBuffer buf;
  buf.size = steps;
  const int dim = env.observation_size();
  buf.observations.resize(steps, dim);
  buf.next_observations.resize(steps, dim);
  buf.actions.resize(steps);
  buf.rewards.resize(steps);
  buf.log_probs.resize(steps);
  buf.values.resize(steps);

  Eigen::VectorXd obs = env.config().observation_mode == ObservationMode::Basic
                            ? observe_basic(env.world(), env.config().effective_slots())
                            : observe_reduced(env.world());
  for (int t = 0; t < steps; ++t) {
    ForwardResult fr = policy_forward(params, obs);
    int a = sample_action(fr.probabilities, rng);
    StepResult sr = env.step(a);
    buf.observations.row(t) = obs.transpose();
    buf.next_observations.row(t) = sr.observation.transpose();
    buf.actions[t] = a;
    buf.rewards[t] = sr.reward;
    buf.log_probs[t] = fr.log_probabilities[a];
    buf.values[t] = fr.value;
    for (const Event& e : sr.events) {
      if (e.kind == EventKind::GlassUnloaded && e.processed) buf.successes++;
      if (e.kind == EventKind::GlassUnloaded && !e.processed) buf.incompletes++;
      if (e.kind == EventKind::GlassDropped) buf.drops++;
      if (e.kind == EventKind::GlassBroken) buf.breaks++;
    }
    obs = sr.observation;
  }
  buf.bootstrap_value = policy_forward(params, obs).value;
  return buf;
}

void compute_gae(RolloutBuffer& buf, double gamma, double lambda) {
  const int t_len = buf.size;
  buf.advantages.resize(t_len);
  buf.returns.resize(t_len);
  double next_adv = 0.0;
  for (int t = t_len - 1; t >= 0; --t) {
    double next_value = t + 1 < t_len ? buf.values[t + 1] : buf.bootstrap_value;
    double delta = buf.rewards[t] + gamma * next_value - buf.values[t];
    next_adv = delta + gamma * lambda * next_adv;
    buf.advantages[t] = next_adv;
    buf.returns[t] = next_adv + buf.values[t];
  }
}

LossResult ppo_loss(const PolicyParams& p, const Minibatch& batch, const PpoConfig& cfg,
                    bool with_gradient) {
  const int n = static_cast<int>(batch.actions.size());
  if (n == 0) throw std::invalid_argument("empty minibatch");

  // normalize advantages per minibatch
  Eigen::VectorXd adv = batch.advantages;
  double mean = adv.mean();
  double var = (adv.array() - mean).square().mean();
  adv = (adv.array() - mean) / (std::sqrt(var) + 1e-8);

  Mlp grad_actor, grad_critic;
  if (with_gradient) {
    grad_actor = zeros_like(p.actor);
    grad_critic = zeros_like(p.critic);
  }

  double clip_obj = 0.0, value_loss = 0.0, entropy_sum = 0.0;
  MlpCache ca, cc;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd obs = batch.observations.row(i).transpose();
    mlp_forward(p.actor, obs, ca);
    mlp_forward(p.critic, obs, cc);
    Eigen::VectorXd probs, logp;
    softmax_from_logits(ca.out, probs, logp);
    const int a = batch.actions[i];
    const double v = cc.out[0];

    double ratio = std::exp(logp[a] - batch.old_log_probs[i]);
    double clipped = std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    double surr1 = ratio * adv[i];
    double surr2 = clipped * adv[i];
    clip_obj += std::min(surr1, surr2);

    double h = -(probs.array() * logp.array()).sum();
    entropy_sum += h;
    double verr = v - batch.returns[i];
    value_loss += verr * verr;

    if (with_gradient) {
      // loss uses -mean(min(surr1, surr2)); gradient flows only through the
      // unclipped branch when it is the active one
      double dlogp_a = (surr1 <= surr2) ? -ratio * adv[i] / n : 0.0;
      Eigen::VectorXd dz = -dlogp_a * probs;
      dz[a] += dlogp_a;
      // entropy bonus: d(-beta * mean H)/dz_j = beta/n * p_j (logp_j + H)
      dz.array() += (cfg.beta_eff / n) * probs.array() * (logp.array() + h);
      mlp_backward(p.actor, ca, dz, grad_actor);

      Eigen::VectorXd dv(1);
      dv[0] = cfg.value_loss_coef * 2.0 * verr / n;
      mlp_backward(p.critic, cc, dv, grad_critic);
    }
  }

  LossResult r;
  r.clip_objective = clip_obj / n;
  r.value_loss = value_loss / n;
  r.entropy = entropy_sum / n;
  r.loss = -r.clip_objective + cfg.value_loss_coef * r.value_loss - cfg.beta_eff * r.entropy;
  if (with_gradient)
    r.gradient = flatten_mlps(grad_actor, grad_critic, p.parameter_count());
  return r;
}

UpdateStats update(PolicyParams& params, const RolloutBuffer& buffer, const PpoConfig& cfg,
                   std::mt19937_64& rng) {
  cfg.validate();
  if (buffer.advantages.size() != buffer.size)
    throw std::invalid_argument("buffer advantages missing: run compute_gae first");

  std::vector<int> idx(buffer.size);
  std::iota(idx.begin(), idx.end(), 0);

  UpdateStats stats;
  int batches = 0;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int start = 0; start < buffer.size; start += cfg.batch_size) {
      int m = std::min(cfg.batch_size, buffer.size - start);
      Minibatch mb;
      mb.observations.resize(m, buffer.observations.cols());
      mb.actions.resize(m);
      mb.old_log_probs.resize(m);
      mb.advantages.resize(m);
      mb.returns.resize(m);
      for (int i = 0; i < m; ++i) {
        int j = idx[start + i];
        mb.observations.row(i) = buffer.observations.row(j);
        mb.actions[i] = buffer.actions[j];
        mb.old_log_probs[i] = buffer.log_probs[j];
        mb.advantages[i] = buffer.advantages[j];
        mb.returns[i] = buffer.returns[j];
      }
      LossResult lr = ppo_loss(params, mb, cfg, true);
      double norm = lr.gradient.norm();
      if (norm > cfg.grad_norm_clip && norm > 0)
        lr.gradient *= cfg.grad_norm_clip / norm;
      if (cfg.learning_rate != 0.0) {
        Eigen::VectorXd flat = params.flatten();
        flat -= cfg.learning_rate * lr.gradient;
        params.unflatten(flat);
      }
      stats.mean_loss += lr.loss;
      stats.mean_entropy += lr.entropy;
      batches++;
    }
  }
  if (batches > 0) {
    stats.mean_loss /= batches;
    stats.mean_entropy /= batches;
  }
  return stats;
}

double gradient_check(const PolicyParams& params, const Minibatch& batch, const PpoConfig& cfg,
                      double h, int min_samples, std::uint64_t seed) {
  LossResult analytic = ppo_loss(params, batch, cfg, true);
  Eigen::VectorXd flat = params.flatten();
  const Eigen::Index n = flat.size();

  std::vector<Eigen::Index> indices;
  if (n <= min_samples) {
    indices.resize(n);
    std::iota(indices.begin(), indices.end(), 0);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> d(0, n - 1);
    indices.resize(min_samples);
    for (auto& i : indices) i = d(rng);
  }

  PolicyParams scratch = params;
  double max_rel = 0.0;
  for (Eigen::Index i : indices) {
    double orig = flat[i];
    flat[i] = orig + h;
    scratch.unflatten(flat);
    double lp = ppo_loss(scratch, batch, cfg, false).loss;
    flat[i] = orig - h;
    scratch.unflatten(flat);
    double lm = ppo_loss(scratch, batch, cfg, false).loss;
    flat[i] = orig;
    double numeric = (lp - lm) / (2.0 * h);
    double a = analytic.gradient[i];
    double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  json j = config_to_json(cp.config);
  j["net"] = {{"input_dim", cp.params.input_dim},
              {"hidden_width", cp.params.hidden_width},
              {"num_actions", cp.params.num_actions}};
  std::string cfg = j.dump();

  std::ostringstream body;
  body.write("GFPC", 4);
  write_u32(body, 1);  // format version
  write_u32(body, static_cast<std::uint32_t>(cfg.size()));
  body.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  write_u64(body, static_cast<std::uint64_t>(cp.train_steps));
  Eigen::VectorXd flat = cp.params.flatten();
  write_u64(body, static_cast<std::uint64_t>(flat.size()));
  body.write(reinterpret_cast<const char*>(flat.data()),
             static_cast<std::streamsize>(sizeof(double) * flat.size()));

  std::string bytes = body.str();
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  write_u32(f, crc);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 + 4 + 4 + 8 + 8 + 4) throw std::runtime_error("checkpoint truncated");

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::uint32_t stored_crc = read_u32(p + bytes.size() - 4);
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size() - 4)));
  if (crc != stored_crc) throw std::runtime_error("checkpoint checksum mismatch");

  if (std::memcmp(bytes.data(), "GFPC", 4) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic)");
  std::uint32_t version = read_u32(p + 4);
  if (version != 1)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  std::uint32_t cfg_len = read_u32(p + 8);
  size_t off = 12;
  if (bytes.size() < off + cfg_len + 16 + 4) throw std::runtime_error("checkpoint truncated");
  std::string cfg_str = bytes.substr(off, cfg_len);
  off += cfg_len;

  Checkpoint cp;
  cp.config_json = cfg_str;
  json j = json::parse(cfg_str);
  cp.config = config_from_json(j);
  cp.train_steps = static_cast<long long>(read_u64(p + off));
  off += 8;
  std::uint64_t count = read_u64(p + off);
  off += 8;
  if (bytes.size() != off + count * sizeof(double) + 4)
    throw std::runtime_error("checkpoint truncated");

  cp.params = init_policy(j["net"]["input_dim"], j["net"]["hidden_width"],
                          j["net"]["num_actions"], 0);
  if (static_cast<Eigen::Index>(count) != cp.params.parameter_count())
    throw std::runtime_error("checkpoint weight count does not match declared shapes");
  Eigen::VectorXd flat(count);
  std::memcpy(flat.data(), bytes.data() + off, count * sizeof(double));
  cp.params.unflatten(flat);
  return cp;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,env_steps,mean_reward,success_count,drop_count,break_count,loss,entropy\n";
  for (const MetricsRow& r : rows) {
    os << r.iteration << ',' << r.env_steps << ',' << r.mean_reward << ',' << r.success_count
       << ',' << r.drop_count << ',' << r.break_count << ',' << r.loss << ',' << r.entropy
       << '\n';
  }
  return os.str();
}

TrainResult train(Env& env, const PpoConfig& cfg, const IterationCallback& on_iteration,
                  const PolicyParams* resume_from, long long resume_steps) {
  cfg.validate();
  TrainResult res;
  res.params = resume_from ? *resume_from
                           : init_policy(env.observation_size(), cfg.hidden_width,
                                         env.action_count(), mix_seed(cfg.seed, 0));
  res.train_steps = resume_steps;
  long long iteration = resume_steps / cfg.buffer_size;
  while (res.train_steps < cfg.max_steps) {
    int steps = static_cast<int>(
        std::min<long long>(cfg.buffer_size, cfg.max_steps - res.train_steps));
    env.reset(mix_seed(cfg.seed, 1000 + iteration));
    std::mt19937_64 rollout_rng(mix_seed(cfg.seed, 2000 + iteration));
    RolloutBuffer buf = collect_rollout(env, res.params, steps, rollout_rng);
    compute_gae(buf, cfg.gamma, cfg.gae_lambda);
    std::mt19937_64 update_rng(mix_seed(cfg.seed, 3000 + iteration));
    UpdateStats us = update(res.params, buf, cfg, update_rng);
    res.train_steps += steps;

    MetricsRow row;
    row.iteration = iteration;
    row.env_steps = res.train_steps;
    row.mean_reward = buf.rewards.mean();
    row.success_count = buf.successes;
    row.drop_count = buf.drops;
    row.break_count = buf.breaks;
    row.loss = us.mean_loss;
    row.entropy = us.mean_entropy;
    res.metrics.push_back(row);
    if (on_iteration) on_iteration(row, res.params);
    iteration++;
  }
  return res;
}

}  // namespace gf
