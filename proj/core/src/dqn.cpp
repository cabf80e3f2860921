#include "osct/dqn.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace osct {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'O', 'S', 'C', 'T', 'Q', 'N', 'E', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void config_error(const std::string& what) { throw Error(ErrorKind::Config, "dqn config: " + what); }

std::vector<int> network_sizes(const DqnConfig& c) {
  std::vector<int> sizes{static_cast<int>(kObservationSize)};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(static_cast<int>(kActionCount));
  return sizes;
}

QNetwork fresh_network(const DqnConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  return QNetwork(network_sizes(c), rng);
}

}  // namespace

void DqnConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) config_error("learning_rate must be positive");
  if (batch_size == 0) config_error("batch_size must be positive");
  if (buffer_size < batch_size) config_error("buffer_size must be at least batch_size");
  if (!(gamma > 0.0 && gamma <= 1.0)) config_error("gamma must be in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) config_error("tau must be in (0, 1]");
  if (train_frequency < 1) config_error("train_frequency must be at least 1");
  if (gradient_steps < 1) config_error("gradient_steps must be at least 1");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    config_error("need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (!(epsilon_fraction > 0.0 && epsilon_fraction <= 1.0)) config_error("epsilon_fraction must be in (0, 1]");
  if (hidden.empty()) config_error("hidden needs at least one layer");
  for (int h : hidden) {
    if (h <= 0) config_error("hidden widths must be positive");
  }
  if (!(max_grad_norm > 0.0)) config_error("max_grad_norm must be positive");
  if (target_update_interval < 1) config_error("target_update_interval must be at least 1");
  if (!(divergence_q_limit > 0.0)) config_error("divergence_q_limit must be positive");
}

void to_json(nlohmann::json& j, const DqnConfig& c) {
  j = nlohmann::json{{"learning_rate", c.learning_rate},
                     {"buffer_size", c.buffer_size},
                     {"gamma", c.gamma},
                     {"tau", c.tau},
                     {"train_frequency", c.train_frequency},
                     {"gradient_steps", c.gradient_steps},
                     {"epsilon_start", c.epsilon_start},
                     {"epsilon_end", c.epsilon_end},
                     {"epsilon_fraction", c.epsilon_fraction},
                     {"batch_size", c.batch_size},
                     {"hidden", c.hidden},
                     {"learning_starts", c.learning_starts},
                     {"max_grad_norm", c.max_grad_norm},
                     {"target_update", c.target_update == TargetUpdate::Soft ? "soft" : "hard"},
                     {"target_update_interval", c.target_update_interval},
                     {"divergence_q_limit", c.divergence_q_limit}};
}

void from_json(const nlohmann::json& j, DqnConfig& c) {
  if (!j.is_object()) config_error("expected an object");
  static const std::set<std::string> known{
      "learning_rate", "buffer_size",     "gamma",         "tau",           "train_frequency",
      "gradient_steps", "epsilon_start",  "epsilon_end",   "epsilon_fraction", "batch_size",
      "hidden",        "learning_starts", "max_grad_norm", "target_update", "target_update_interval",
      "divergence_q_limit"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) config_error("unknown key '" + key + "'");
  }
  try {
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    opt("learning_rate", c.learning_rate);
    opt("buffer_size", c.buffer_size);
    opt("gamma", c.gamma);
    opt("tau", c.tau);
    opt("train_frequency", c.train_frequency);
    opt("gradient_steps", c.gradient_steps);
    opt("epsilon_start", c.epsilon_start);
    opt("epsilon_end", c.epsilon_end);
    opt("epsilon_fraction", c.epsilon_fraction);
    opt("batch_size", c.batch_size);
    opt("hidden", c.hidden);
    opt("learning_starts", c.learning_starts);
    opt("max_grad_norm", c.max_grad_norm);
    opt("target_update_interval", c.target_update_interval);
    opt("divergence_q_limit", c.divergence_q_limit);
    if (j.contains("target_update")) {
      const auto mode = j.at("target_update").get<std::string>();
      if (mode == "soft") {
        c.target_update = TargetUpdate::Soft;
      } else if (mode == "hard") {
        c.target_update = TargetUpdate::Hard;
      } else {
        config_error("target_update must be 'soft' or 'hard'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  }
  c.validate();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorKind::InvalidArgument, "replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
    return;
  }
  data_[next_] = t;
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, std::mt19937_64& rng) const {
  if (data_.empty()) throw Error(ErrorKind::State, "sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

TdBatch<float> make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  const auto d = static_cast<Eigen::Index>(kObservationSize);
  TdBatch<float> b;
  b.observations.resize(d, n);
  b.next_observations.resize(d, n);
  b.rewards.resize(n);
  b.dones.resize(n);
  b.actions.resize(indices.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = buffer[indices[static_cast<std::size_t>(i)]];
    b.observations.col(i) = Eigen::Map<const Eigen::VectorXf>(t.observation.data(), d);
    b.next_observations.col(i) = Eigen::Map<const Eigen::VectorXf>(t.next_observation.data(), d);
    b.rewards[i] = t.reward;
    b.dones[i] = t.done ? 1.0f : 0.0f;
    b.actions[static_cast<std::size_t>(i)] = t.action;
  }
  return b;
}

int greedy_action(const nn::Vector<float>& q) {
  int best = 0;
  for (int a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

void require_observation(std::span<const float> obs) {
  if (obs.size() != kObservationSize) {
    throw Error(ErrorKind::InvalidArgument,
                "observation has " + std::to_string(obs.size()) + " entries, expected " +
                    std::to_string(kObservationSize));
  }
  for (float v : obs) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "observation contains a non-finite value");
  }
}

DqnAgent::DqnAgent(DqnConfig config, std::uint64_t seed)
    : DqnAgent(config, fresh_network(config, seed)) {}

DqnAgent::DqnAgent(DqnConfig config, QNetwork online)
    : config_(std::move(config)),
      online_(std::move(online)),
      target_(online_),
      optimizer_(static_cast<float>(config_.learning_rate)) {
  config_.validate();
  if (online_.sizes() != network_sizes(config_)) {
    throw Error(ErrorKind::InvalidArgument, "network shape does not match the config");
  }
}

nn::Vector<float> DqnAgent::q_values(const Observation& obs) const {
  require_observation(obs);
  const Eigen::Map<const Eigen::VectorXf> x(obs.data(), static_cast<Eigen::Index>(obs.size()));
  return online_.forward(nn::Matrix<float>(x)).col(0);
}

int DqnAgent::act(const Observation& obs, double epsilon, std::mt19937_64& rng) const {
  // Always consume the same draws so the stream does not depend on epsilon.
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> uniform(0, static_cast<int>(kActionCount) - 1);
  const double u = coin(rng);
  const int random_action = uniform(rng);
  if (u < epsilon) return random_action;
  return greedy_action(q_values(obs));
}

TdResult<float> DqnAgent::learn(const TdBatch<float>& batch) {
  auto r = td_loss(online_, target_, batch, static_cast<float>(config_.gamma));
  const float norm = std::sqrt(r.gradients.squared_norm());
  const auto limit = static_cast<float>(config_.max_grad_norm);
  if (std::isfinite(norm) && norm > limit) r.gradients.scale(limit / norm);
  if (std::isfinite(norm)) optimizer_.step(online_, r.gradients);
  return r;
}

void DqnAgent::update_target() {
  if (config_.target_update == TargetUpdate::Soft) {
    target_.soft_update_from(online_, static_cast<float>(config_.tau));
  } else {
    target_ = online_;
  }
}

Policy greedy_policy(const DqnAgent& agent, double epsilon) {
  auto net = std::make_shared<const QNetwork>(agent.online());
  return [net, epsilon](const Observation& obs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> uniform(0, static_cast<int>(kActionCount) - 1);
    const double u = coin(rng);
    const int random_action = uniform(rng);
    if (u < epsilon) return random_action;
    require_observation(obs);
    const Eigen::Map<const Eigen::VectorXf> x(obs.data(), static_cast<Eigen::Index>(obs.size()));
    return greedy_action(net->forward(nn::Matrix<float>(x)).col(0));
  };
}

Policy random_policy() {
  return [](const Observation&, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> uniform(0, static_cast<int>(kActionCount) - 1);
    return uniform(rng);
  };
}

Policy constant_policy(int action) {
  if (action < 0 || action >= static_cast<int>(kActionCount)) {
    throw Error(ErrorKind::InvalidArgument, "constant_policy: action out of range");
  }
  return [action](const Observation&, std::mt19937_64&) { return action; };
}

double TrainingLog::loss_variance() const {
  const std::size_t half = losses.size() / 2;
  const std::size_t n = losses.size() - half;
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (std::size_t i = half; i < losses.size(); ++i) mean += losses[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = half; i < losses.size(); ++i) {
    const double d = losses[i] - mean;
    var += d * d;
  }
  return var / static_cast<double>(n);
}

void TrainingLog::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "episode,reward,hardness,loss,epsilon\n";
  out.precision(10);
  for (const auto& e : episodes) {
    out << e.episode << ',' << e.reward << ',' << e.hardness << ',';
    if (!std::isnan(e.loss)) out << e.loss;
    out << ',' << e.epsilon << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "error writing " + path);
}

double epsilon_at(const DqnConfig& c, std::uint64_t step, std::uint64_t total_steps) {
  const double horizon = c.epsilon_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0) return c.epsilon_end;
  const double progress = static_cast<double>(step) / horizon;
  if (progress >= 1.0) return c.epsilon_end;
  return c.epsilon_start + (c.epsilon_end - c.epsilon_start) * progress;
}

std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) ^ (index * 0xD1B54A32D192ED03ull));
}

TrainingResult train(StoryEnv& env, const DqnConfig& config, std::uint64_t total_steps, std::uint64_t seed) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  DqnAgent agent(config, seed);
  TrainingLog log;
  ReplayBuffer buffer(config.buffer_size);
  std::mt19937_64 rng(splitmix64(seed ^ 0xA5A5A5A5ull));

  std::uint64_t episode = 0;
  Observation obs = env.reset(episode_seed(seed, episode));
  double episode_reward = 0.0;
  double episode_loss = 0.0;
  std::size_t episode_updates = 0;

  for (std::uint64_t step = 0; step < total_steps && !log.diverged; ++step) {
    env.set_progress(step, total_steps);
    const double eps = epsilon_at(config, step, total_steps);
    const int action = agent.act(obs, eps, rng);
    StepResult r = env.step(action);
    buffer.push({obs, action, static_cast<float>(r.reward), r.observation, r.done});
    episode_reward += r.reward;
    obs = r.observation;
    log.steps = step + 1;

    const bool train_now = log.steps >= config.learning_starts && log.steps % config.train_frequency == 0 &&
                           buffer.size() >= config.batch_size;
    if (train_now) {
      for (int g = 0; g < config.gradient_steps; ++g) {
        const auto result = agent.learn(make_batch(buffer, buffer.sample_indices(config.batch_size, rng)));
        log.losses.push_back(result.loss);
        log.max_abs_q = std::max(log.max_abs_q, static_cast<double>(result.max_abs_q));
        if (!std::isfinite(result.loss)) {
          log.diverged = true;
          log.divergence_reason = "non-finite loss at step " + std::to_string(log.steps);
          break;
        }
        if (!(result.max_abs_q <= config.divergence_q_limit)) {
          log.diverged = true;
          log.divergence_reason = "Q-value magnitude exceeded " + std::to_string(config.divergence_q_limit) +
                                  " at step " + std::to_string(log.steps);
          break;
        }
        episode_loss += result.loss;
        ++episode_updates;
      }
      if (config.target_update == TargetUpdate::Soft) agent.update_target();
    }
    if (config.target_update == TargetUpdate::Hard && log.steps % config.target_update_interval == 0) {
      agent.update_target();
    }

    if (r.done) {
      EpisodeLog e;
      e.episode = episode;
      e.reward = episode_reward;
      e.hardness = r.info.report ? r.info.report->composite_h : 0.0;
      e.loss = episode_updates ? episode_loss / static_cast<double>(episode_updates)
                               : std::numeric_limits<double>::quiet_NaN();
      e.epsilon = eps;
      log.episodes.push_back(e);
      ++episode;
      episode_reward = 0.0;
      episode_loss = 0.0;
      episode_updates = 0;
      obs = env.reset(episode_seed(seed, episode));
    }
  }
  log.soft_diverged = log.max_abs_q > return_bound(config.gamma);
  log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(agent), std::move(log)};
}

EvalResult evaluate_policy(StoryEnv& env, const Policy& policy, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw Error(ErrorKind::InvalidArgument, "evaluate_policy: need at least one episode");
  const auto& w = env.config().phase_weights[2];
  const CurriculumPhase final_phase{3, w.hardness, w.diversity, w.validity};
  std::mt19937_64 rng(splitmix64(seed ^ 0x5EEDull));
  EvalResult out;
  double hardness = 0.0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    Observation obs = env.reset(episode_seed(seed, ep));
    env.set_phase(final_phase);
    double total = 0.0;
    while (!env.done()) {
      StepResult r = env.step(policy(obs, rng));
      total += r.reward;
      obs = r.observation;
    }
    out.rewards.push_back(total);
    hardness += env.last_report() ? env.last_report()->composite_h : 0.0;
  }
  out.mean_reward = std::accumulate(out.rewards.begin(), out.rewards.end(), 0.0) / static_cast<double>(episodes);
  out.mean_hardness = hardness / static_cast<double>(episodes);
  return out;
}

std::string checkpoint_id(const DqnAgent& agent) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ull;
    }
  };
  for (int s : agent.online().sizes()) mix(&s, sizeof s);
  const auto params = agent.online().flatten();
  mix(params.data(), params.size() * sizeof(float));
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

void save_checkpoint(const DqnAgent& agent, const std::string& path) {
  const auto params = agent.online().flatten();
  const std::string header = nlohmann::json{{"config", agent.config()},
                                            {"sizes", agent.online().sizes()},
                                            {"parameter_count", params.size()},
                                            {"dtype", "float32"},
                                            {"checkpoint_id", checkpoint_id(agent)}}
                                 .dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint " + path);
  const auto header_len = static_cast<std::uint32_t>(header.size());
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion), sizeof kCheckpointVersion);
  out.write(reinterpret_cast<const char*>(&header_len), sizeof header_len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(params.data()), static_cast<std::streamsize>(params.size() * sizeof(float)));
  if (!out) throw Error(ErrorKind::Io, "error writing checkpoint " + path);
}

DqnAgent load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingCheckpoint, "checkpoint not found: " + path);
  char magic[sizeof kMagic];
  std::uint32_t version = 0;
  std::uint32_t header_len = 0;
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::Parse, "not a checkpoint file: " + path);
  }
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
  if (!in) throw Error(ErrorKind::Parse, "truncated checkpoint: " + path);
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::Parse, "unsupported checkpoint version " + std::to_string(version));
  }
  if (header_len > (1u << 20)) throw Error(ErrorKind::Parse, "checkpoint header too large");
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) throw Error(ErrorKind::Parse, "truncated checkpoint: " + path);

  DqnConfig config;
  std::vector<int> sizes;
  std::size_t count = 0;
  try {
    const auto j = nlohmann::json::parse(header);
    config = j.at("config").get<DqnConfig>();
    sizes = j.at("sizes").get<std::vector<int>>();
    count = j.at("parameter_count").get<std::size_t>();
    if (j.at("dtype").get<std::string>() != "float32") throw Error(ErrorKind::Parse, "unsupported dtype");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad checkpoint header: ") + e.what());
  }
  if (sizes != network_sizes(config)) throw Error(ErrorKind::Parse, "checkpoint sizes disagree with its config");

  DqnAgent agent(config, 0);
  if (agent.online().parameter_count() != count) throw Error(ErrorKind::Parse, "checkpoint parameter count mismatch");
  std::vector<float> params(count);
  in.read(reinterpret_cast<char*>(params.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (!in) throw Error(ErrorKind::Parse, "truncated checkpoint weights: " + path);
  in.peek();
  if (!in.eof()) throw Error(ErrorKind::Parse, "trailing bytes in checkpoint: " + path);
  agent.online().unflatten(params);
  agent.target() = agent.online();
  return agent;
}

}  // namespace osct
