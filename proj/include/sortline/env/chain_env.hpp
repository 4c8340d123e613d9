#pragma once

#include "sortline/env/environment.hpp"

namespace sortline::env {

/// Small deterministic corridor used to test the learners against exact
/// dynamic programming. States are one-hot; action 0 moves left, 1 right.
/// Leaving the left end pays `left_reward` and ends the episode, leaving
/// the right end pays `right_reward` (reported as goal_reached). Every
/// other move pays zero. The start state is drawn uniformly from the seed.
struct ChainConfig {
  int states = 5;
  double left_reward = 0.75;
  double right_reward = 1.0;
  int max_steps = 20;
};

class ChainEnv final : public Environment {
 public:
  explicit ChainEnv(ChainConfig config = {});

  [[nodiscard]] int observation_size() const override { return config_.states; }
  [[nodiscard]] int action_count() const override { return 2; }

  Observation reset(std::uint64_t seed) override;
  /// Starts from a fixed state.
  Observation reset_to(int state);
  StepResult step(int action) override;

  [[nodiscard]] int state() const { return state_; }
  [[nodiscard]] const ChainConfig& config() const { return config_; }

 private:
  [[nodiscard]] Observation observe() const;

  ChainConfig config_;
  int state_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace sortline::env
