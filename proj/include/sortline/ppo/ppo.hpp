#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sortline/nn/adam.hpp"
#include "sortline/nn/network.hpp"
#include "sortline/random.hpp"
#include "sortline/rl/agent.hpp"
#include "sortline/rl/loop.hpp"

namespace sortline::ppo {

struct PpoConfig {
  double clip_eps = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  int epochs = 4;
  int minibatch = 64;
  int horizon = 2048;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double lr = 3e-4;
  /// One network whose last layer emits the logits and the value.
  bool shared_trunk = false;
  bool normalize_advantages = true;
  std::vector<int> hidden = {200, 100};
};

/// Throws ConfigError on out-of-range settings.
void check_config(const PpoConfig& config);

/// Probability ratio pi_new(a|s) / pi_old(a|s) from log-probabilities.
double ratio(double logp_new, double logp_old);

/// min(r * adv, clip(r, 1 - eps, 1 + eps) * adv) for one sample.
double clipped_term(double r, double adv, double eps);

/// Derivative of clipped_term with respect to r: adv where the unclipped
/// branch is the minimum, zero where clipping flattens the objective.
double clipped_slope(double r, double adv, double eps);

/// Mean of clipped_term. Throws ShapeError on unequal lengths.
double clipped_objective(std::span<const double> ratios, std::span<const double> advantages,
                         double eps);

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

/// Generalised advantage estimation over a rollout that may span several
/// episodes. next_values[t] is V(s_{t+1}), used unless dones[t]. The trace
/// is cut after terminal and truncated steps, but truncated steps still
/// bootstrap from next_values. Throws ShapeError on misaligned inputs.
Advantages gae(const std::vector<double>& rewards, const std::vector<double>& values,
               const std::vector<double>& next_values, const std::vector<bool>& dones,
               const std::vector<bool>& truncateds, double gamma, double lambda);

/// Zero mean, unit variance; all zeros when the variance is below 1e-8.
std::vector<double> normalize_advantages(std::vector<double> adv);

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

/// Per-step records collected under the behaviour policy.
struct Rollout {
  std::vector<env::Observation> observations;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<double> next_values;
  std::vector<bool> dones;
  std::vector<bool> truncateds;

  [[nodiscard]] size_t size() const { return actions.size(); }
  void clear();
};

/// Minibatch view of the quantities the loss needs.
struct LossInputs {
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct LossTerms {
  double policy_loss = 0.0;  // minus the mean clipped objective
  double value_loss = 0.0;   // mean squared error of the value estimate
  double entropy = 0.0;      // mean policy entropy
  double clip_fraction = 0.0;
};

/// policy_loss + value_coef * value_loss - entropy_coef * entropy
double total_loss(const LossTerms& terms, const PpoConfig& config);

struct LossGrad {
  LossTerms terms;
  nn::Matrix grad;  // d total / d network output
};

/// Policy part of the loss for a batch of logits.
LossGrad policy_loss(const nn::Matrix& logits, const LossInputs& in, const PpoConfig& config);
/// Value part for a batch of single-column value outputs.
LossGrad value_loss(const nn::Matrix& values, const LossInputs& in, const PpoConfig& config);
/// Shared-trunk output: the first columns are logits, the last the value.
LossGrad composite_loss(const nn::Matrix& output, const LossInputs& in, const PpoConfig& config);

/// Policy and value function with their optimisers.
class PolicyValue {
 public:
  PolicyValue(int observation_size, int action_count, const PpoConfig& config, std::uint64_t seed);

  [[nodiscard]] bool shared() const { return shared_; }
  [[nodiscard]] int action_count() const { return actions_; }

  /// Logits and value estimate for one observation.
  std::pair<std::vector<double>, double> evaluate(std::span<const double> observation);
  double value(std::span<const double> observation);

  nn::Network policy;  // logits, or logits and value when shared
  nn::Network value_net;
  nn::Adam policy_opt;
  nn::Adam value_opt;

 private:
  int actions_;
  bool shared_;
};

struct UpdateMetrics {
  LossTerms terms;  // means over minibatches
  int minibatches = 0;
};

/// Advantages, then `epochs` passes of shuffled minibatch descent.
UpdateMetrics ppo_update(PolicyValue& pv, const Rollout& rollout, const PpoConfig& config, Rng& gen);

/// Draws from a categorical distribution with one uniform.
int sample_categorical(std::span<const double> probs, Rng& gen);

class PpoAgent final : public rl::Agent {
 public:
  PpoAgent(int observation_size, int action_count, PpoConfig config, std::uint64_t seed);

  rl::EpisodeStats train_episode(env::Environment& env, std::uint64_t seed) override;
  /// Mode of the policy.
  int act(std::span<const double> observation) override;
  [[nodiscard]] nn::Checkpoint checkpoint() const override;
  [[nodiscard]] nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

  [[nodiscard]] PolicyValue& model() { return pv_; }
  [[nodiscard]] const Rollout& rollout() const { return rollout_; }
  [[nodiscard]] const UpdateMetrics& last_update() const { return last_; }
  [[nodiscard]] int updates() const { return updates_; }

 private:
  PpoConfig config_;
  PolicyValue pv_;
  Rollout rollout_;
  Rng gen_;
  UpdateMetrics last_;
  int updates_ = 0;
  std::int64_t episodes_ = 0;
};

rl::TrainResult ppo_train(const std::function<std::unique_ptr<env::Environment>()>& make_env,
                          const PpoConfig& config, const rl::LoopConfig& loop,
                          const rl::LoopHooks& hooks = {});

}  // namespace sortline::ppo
