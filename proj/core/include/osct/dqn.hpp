#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/env.hpp"
#include "osct/nn.hpp"

namespace osct {

enum class TargetUpdate { Soft, Hard };

struct DqnConfig {
  double learning_rate = 5.95e-4;
  std::size_t buffer_size = 100'000;
  double gamma = 0.902;
  double tau = 0.019;
  int train_frequency = 8;
  int gradient_steps = 5;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.2;
  std::size_t batch_size = 64;
  std::vector<int> hidden{256, 256};
  std::size_t learning_starts = 1'000;
  double max_grad_norm = 10.0;
  TargetUpdate target_update = TargetUpdate::Soft;
  int target_update_interval = 500;  // env steps, hard mode only
  // |Q| beyond this is treated as divergence alongside non-finite loss.
  double divergence_q_limit = 1e4;

  // Throws Error(Config) when an invariant is broken.
  void validate() const;
  bool operator==(const DqnConfig&) const = default;
};

void to_json(nlohmann::json& j, const DqnConfig& c);
void from_json(const nlohmann::json& j, DqnConfig& c);

struct Transition {
  Observation observation{};
  int action = 0;
  float reward = 0.0f;
  Observation next_observation{};
  bool done = false;
};

// Fixed-capacity FIFO of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_.at(i); }
  // Oldest first.
  const Transition& oldest() const { return data_.at(size() < capacity_ ? 0 : next_); }
  std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

template <typename Scalar>
struct TdBatch {
  nn::Matrix<Scalar> observations;       // 256 x B
  std::vector<int> actions;              // B
  nn::Vector<Scalar> rewards;            // B
  nn::Matrix<Scalar> next_observations;  // 256 x B
  nn::Vector<Scalar> dones;              // B, 1 for terminal
};

template <typename Scalar>
struct TdResult {
  Scalar loss = 0;
  Scalar max_abs_q = 0;
  nn::Gradients<Scalar> gradients;
};

// Huber TD loss against the bootstrap target r + gamma * (1 - done) * max_a Q_target(s', a).
// The target is a constant; gradients flow through the online network only.
template <typename Scalar>
Scalar td_targets(const nn::Mlp<Scalar>& target, const TdBatch<Scalar>& batch, Scalar gamma,
                  nn::Vector<Scalar>& out) {
  const nn::Matrix<Scalar> next_q = target.forward(batch.next_observations);
  const auto n = static_cast<Eigen::Index>(batch.actions.size());
  out.resize(n);
  Scalar max_abs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar best = next_q.col(i).maxCoeff();
    max_abs = std::max(max_abs, next_q.col(i).cwiseAbs().maxCoeff());
    out[i] = batch.rewards[i] + gamma * (Scalar(1) - batch.dones[i]) * best;
  }
  return max_abs;
}

template <typename Scalar>
Scalar huber(Scalar diff, Scalar delta = Scalar(1)) {
  const Scalar a = std::abs(diff);
  return a <= delta ? Scalar(0.5) * diff * diff : delta * (a - Scalar(0.5) * delta);
}

template <typename Scalar>
TdResult<Scalar> td_loss(const nn::Mlp<Scalar>& online, const nn::Mlp<Scalar>& target, const TdBatch<Scalar>& batch,
                         Scalar gamma) {
  nn::Vector<Scalar> y;
  TdResult<Scalar> r;
  r.max_abs_q = td_targets(target, batch, gamma, y);

  typename nn::Mlp<Scalar>::Tape tape;
  const nn::Matrix<Scalar> q = online.forward(batch.observations, tape);
  r.max_abs_q = std::max(r.max_abs_q, q.cwiseAbs().maxCoeff());

  const auto n = static_cast<Eigen::Index>(batch.actions.size());
  nn::Matrix<Scalar> grad_out = nn::Matrix<Scalar>::Zero(q.rows(), q.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar diff = q(batch.actions[static_cast<std::size_t>(i)], i) - y[i];
    r.loss += huber(diff);
    grad_out(batch.actions[static_cast<std::size_t>(i)], i) = std::clamp(diff, Scalar(-1), Scalar(1));
  }
  r.loss /= static_cast<Scalar>(n);
  grad_out /= static_cast<Scalar>(n);
  r.gradients = online.backward(tape, grad_out);
  return r;
}

TdBatch<float> make_batch(const ReplayBuffer& buffer, const std::vector<std::size_t>& indices);

using QNetwork = nn::Mlp<float>;

// Argmax with ties broken toward the lowest action id.
int greedy_action(const nn::Vector<float>& q);

class DqnAgent {
 public:
  DqnAgent(DqnConfig config, std::uint64_t seed);
  DqnAgent(DqnConfig config, QNetwork online);

  const DqnConfig& config() const noexcept { return config_; }
  const QNetwork& online() const noexcept { return online_; }
  const QNetwork& target() const noexcept { return target_; }
  QNetwork& online() noexcept { return online_; }
  QNetwork& target() noexcept { return target_; }

  nn::Vector<float> q_values(const Observation& obs) const;
  // Uniform over the 15 actions with probability epsilon, otherwise greedy.
  int act(const Observation& obs, double epsilon, std::mt19937_64& rng) const;

  // One optimizer step on a minibatch; returns the loss and the largest |Q| seen.
  TdResult<float> learn(const TdBatch<float>& batch);
  void update_target();

 private:
  DqnConfig config_;
  QNetwork online_;
  QNetwork target_;
  nn::Adam<float> optimizer_;
};

// Checks an observation before it reaches the network.
void require_observation(std::span<const float> obs);

using Policy = std::function<int(const Observation&, std::mt19937_64&)>;
Policy greedy_policy(const DqnAgent& agent, double epsilon);
Policy random_policy();
Policy constant_policy(int action);

struct EpisodeLog {
  std::size_t episode = 0;
  double reward = 0.0;
  double hardness = 0.0;
  double loss = std::numeric_limits<double>::quiet_NaN();  // mean over the episode's updates
  double epsilon = 0.0;
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  std::vector<float> losses;  // one per gradient step
  double max_abs_q = 0.0;     // largest |Q| seen by any update
  // max_abs_q went past return_bound: no policy can earn such a value, so the
  // estimates have drifted. Recorded only; training continues.
  bool soft_diverged = false;
  std::uint64_t steps = 0;
  bool diverged = false;
  std::string divergence_reason;
  double seconds = 0.0;

  // Variance of the per-update loss over the second half of training.
  double loss_variance() const;
  void write_csv(const std::string& path) const;
  bool operator==(const TrainingLog& o) const {
    // Wall-clock time is not part of the record.
    return episodes.size() == o.episodes.size() && losses == o.losses && steps == o.steps &&
           diverged == o.diverged && soft_diverged == o.soft_diverged && divergence_reason == o.divergence_reason &&
           std::equal(episodes.begin(), episodes.end(), o.episodes.begin(), [](const auto& a, const auto& b) {
             auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
             return a.episode == b.episode && a.reward == b.reward && a.hardness == b.hardness &&
                    same(a.loss, b.loss) && a.epsilon == b.epsilon;
           });
  }
};

// Largest |return| any policy can reach when every reward lies in [-1, 1].
inline double return_bound(double gamma) noexcept {
  return gamma < 1.0 ? 1.0 / (1.0 - gamma) : std::numeric_limits<double>::infinity();
}

double epsilon_at(const DqnConfig& config, std::uint64_t step, std::uint64_t total_steps);

// Per-episode seed used by training, evaluation and generation rollouts.
std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index) noexcept;

struct TrainingResult {
  DqnAgent agent;
  TrainingLog log;
};

// Epsilon-greedy DQN on the environment; the curriculum phase follows the
// global step. Divergence stops training early and is reported in the log.
TrainingResult train(StoryEnv& env, const DqnConfig& config, std::uint64_t total_steps, std::uint64_t seed);

struct EvalResult {
  double mean_reward = 0.0;
  double mean_hardness = 0.0;
  std::vector<double> rewards;
};

// Rolls out `episodes` episodes under the final curriculum phase.
EvalResult evaluate_policy(StoryEnv& env, const Policy& policy, std::size_t episodes, std::uint64_t seed);

inline constexpr double kEvalEpsilon = 0.02;

// Versioned binary checkpoint: magic, version, JSON header, float32 weights.
void save_checkpoint(const DqnAgent& agent, const std::string& path);
DqnAgent load_checkpoint(const std::string& path);
std::string checkpoint_id(const DqnAgent& agent);

}  // namespace osct
