#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sortline/dqn/replay_buffer.hpp"
#include "sortline/nn/adam.hpp"
#include "sortline/nn/network.hpp"
#include "sortline/rl/agent.hpp"
#include "sortline/rl/loop.hpp"

namespace sortline::dqn {

class BufferTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DqnConfig {
  double gamma = 0.99;
  std::size_t buffer_capacity = 100'000;
  int batch_size = 64;
  std::size_t warmup = 1'000;
  int sync_interval = 1'000;  // updates between target copies
  double lr = 1e-4;
  double eps_start = 1.0;
  double eps_end = 0.1;
  /// Episodes over which epsilon decays; 0 means half the episode budget.
  int eps_span = 0;
  double huber_delta = 1.0;
  std::vector<int> hidden = {200, 100};
};

/// Linear decay from start to end over `span` steps, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.1;
  std::int64_t span = 1;

  [[nodiscard]] double value(std::int64_t step) const;
};

/// Epsilon-greedy: with probability eps a uniform action, otherwise the
/// argmax of Q (lowest index on ties). Draws one uniform per call.
int select_action(nn::Network& q, std::span<const double> s, double eps, Rng& gen);

/// y = r for terminal transitions, r + gamma * max_a Q_target(s', a)
/// otherwise.
std::vector<double> td_targets(std::span<const Experience* const> batch, nn::Network& target,
                               double gamma);

/// Mean Huber loss between Q(s, a) and the targets, plus its derivative
/// with respect to every Q output (zero outside the taken actions).
struct QLoss {
  double value = 0.0;
  nn::Matrix grad;
};
QLoss huber_q_loss(const nn::Matrix& q, std::span<const int> actions,
                   std::span<const double> targets, double delta = 1.0);

/// Online and target networks with their optimiser.
struct DqnLearner {
  nn::Network online;
  nn::Network target;
  nn::Adam optimizer;
  std::int64_t updates = 0;

  DqnLearner(int observation_size, int action_count, const DqnConfig& config, std::uint64_t seed);
};

/// One minibatch step. Throws BufferTooSmall below the warmup threshold.
double dqn_update(DqnLearner& learner, const ReplayBuffer& buffer, const DqnConfig& config,
                  Rng& gen);

class DqnAgent final : public rl::Agent {
 public:
  /// `episode_budget` sizes the default exploration schedule.
  DqnAgent(int observation_size, int action_count, DqnConfig config, int episode_budget,
           std::uint64_t seed);

  rl::EpisodeStats train_episode(env::Environment& env, std::uint64_t seed) override;
  int act(std::span<const double> observation) override;
  [[nodiscard]] nn::Checkpoint checkpoint() const override;
  [[nodiscard]] nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

  [[nodiscard]] const DqnLearner& learner() const { return learner_; }
  [[nodiscard]] DqnLearner& learner() { return learner_; }
  [[nodiscard]] const ReplayBuffer& buffer() const { return buffer_; }
  [[nodiscard]] const EpsilonSchedule& schedule() const { return schedule_; }
  [[nodiscard]] std::int64_t episodes_done() const { return episodes_; }
  [[nodiscard]] double last_loss() const { return last_loss_; }

 private:
  DqnConfig config_;
  DqnLearner learner_;
  ReplayBuffer buffer_;
  EpsilonSchedule schedule_;
  Rng gen_;
  std::int64_t episodes_ = 0;
  double last_loss_ = 0.0;
};

/// Trains a fresh agent on environments from `make_env`.
rl::TrainResult dqn_train(const std::function<std::unique_ptr<env::Environment>()>& make_env,
                          const DqnConfig& config, const rl::LoopConfig& loop,
                          const rl::LoopHooks& hooks = {});

}  // namespace sortline::dqn
