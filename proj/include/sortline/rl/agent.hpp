#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <span>

#include "sortline/env/environment.hpp"
#include "sortline/nn/checkpoint.hpp"

namespace sortline::rl {

/// Outcome of one episode, training or evaluation.
struct EpisodeStats {
  double reward = 0.0;
  int length = 0;  // steps, which equal ticks
  bool success = false;
  int correct = 0;
  int missorted = 0;
  bool collision = false;
  int n_products = 0;
};

/// Folds one step into the running totals.
void record_step(EpisodeStats& stats, const env::StepResult& r);

/// Deterministic action choice for evaluation.
using Policy = std::function<int(std::span<const double>)>;

/// Runs one episode to termination or truncation.
EpisodeStats run_episode(env::Environment& env, const Policy& policy, std::uint64_t seed);

/// Something that learns from whole episodes of an Environment.
class Agent {
 public:
  virtual ~Agent() = default;

  /// Plays one episode with the behaviour policy, learning as it goes.
  virtual EpisodeStats train_episode(env::Environment& env, std::uint64_t seed) = 0;

  /// Greedy (evaluation) action.
  virtual int act(std::span<const double> observation) = 0;

  /// Networks plus metadata, enough to rebuild the evaluation policy.
  [[nodiscard]] virtual nn::Checkpoint checkpoint() const = 0;

  /// Learner state for resuming: networks, optimiser moments, generator
  /// state and counters. Experience buffers are not included.
  [[nodiscard]] virtual nlohmann::json save_state() const = 0;
  virtual void load_state(const nlohmann::json& state) = 0;
};

}  // namespace sortline::rl
