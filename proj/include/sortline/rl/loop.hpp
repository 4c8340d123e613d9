#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sortline/rl/agent.hpp"

namespace sortline::rl {

inline constexpr int kEvalInterval = 100;
inline constexpr int kEvalEpisodes = 5;

/// Mean over a batch of deterministic evaluation episodes.
struct EvalStats {
  int episodes = 0;
  double success_pct = 0.0;
  double correct_pct = 0.0;
  /// Mean length over successful episodes; empty when none succeeded.
  std::optional<double> success_length;
};

/// Plays `n` episodes with seeds derive_seed(seed, 0, k). Throws
/// ConfigError when n < 1.
std::vector<EpisodeStats> evaluate_episodes(env::Environment& env, const Policy& policy, int n,
                                            std::uint64_t seed);
EvalStats summarize(const std::vector<EpisodeStats>& episodes);

/// summarize(evaluate_episodes(...)).
EvalStats evaluate(env::Environment& env, const Policy& policy, int n, std::uint64_t seed);

struct EpisodeRow {
  int episode = 0;
  EpisodeStats stats;
  double wall_seconds = 0.0;
};

struct EvalRow {
  int episode = 0;  // training episodes completed before this evaluation
  EvalStats stats;
};

struct RunRecord {
  std::vector<EpisodeRow> episodes;
  std::vector<EvalRow> evals;
};

struct LoopConfig {
  int episodes = 0;
  int eval_interval = kEvalInterval;
  int eval_episodes = kEvalEpisodes;
  std::uint64_t seed = 1;
};

struct LoopHooks {
  std::function<void(const EpisodeRow&)> on_episode;
  /// `improved` marks a new best evaluation; the agent holds that policy.
  std::function<void(const EvalRow&, const Agent&, bool improved)> on_eval;
};

/// Where a resumed loop picks up.
struct LoopStart {
  int episode = 0;
  std::optional<EvalStats> best;
};

/// Orders evaluations: success first, then correctly sorted share.
bool better_eval(const EvalStats& a, const std::optional<EvalStats>& incumbent);

struct TrainResult {
  RunRecord record;
  nn::Checkpoint final_checkpoint;
  nn::Checkpoint best_checkpoint;
  std::optional<EvalStats> best;
};

/// Training episode `e` of a run uses env seed derive_seed(seed, 3, e);
/// evaluations always replay the same `eval_episodes` seeds.
std::uint64_t training_episode_seed(std::uint64_t run_seed, int episode);
std::uint64_t evaluation_seed(std::uint64_t run_seed);

/// Trains for the configured episode budget, evaluating the greedy policy
/// every `eval_interval` episodes and keeping the best checkpoint.
TrainResult run_loop(Agent& agent, env::Environment& train_env, env::Environment& eval_env,
                     const LoopConfig& config, const LoopHooks& hooks = {},
                     const LoopStart& start = {});

}  // namespace sortline::rl
