#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sortline/harness/config.hpp"
#include "sortline/nn/checkpoint.hpp"
#include "sortline/rl/loop.hpp"

namespace sortline::harness {

namespace fs = std::filesystem;

inline constexpr const char* kManifestFormat = "sortline-run";
inline constexpr int kManifestVersion = 1;

/// <out>/<algo>-<reward>
fs::path cell_dir(const fs::path& out, Algo algo, env::RewardVariant reward);
/// <cell>/seed-<n>
fs::path seed_dir(const fs::path& cell, std::uint64_t seed);

/// Per-episode CSV: episode,reward,length,success,correct,missort,collision
/// with 1-based episode numbers.
std::string episodes_csv(const std::vector<rl::EpisodeRow>& rows);
/// Per-evaluation CSV: episode,eval_success,eval_correct_pct,eval_len_mean.
/// eval_len_mean is empty when no evaluation episode succeeded.
std::string evals_csv(const std::vector<rl::EvalRow>& rows);
std::vector<rl::EpisodeRow> parse_episodes_csv(const std::string& text);
std::vector<rl::EvalRow> parse_evals_csv(const std::string& text);

/// Builds a fresh learner for the configured algorithm.
std::unique_ptr<rl::Agent> make_agent(const ExperimentConfig& config, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  bool skipped = false;   // already complete with the same config hash
  bool resumed = false;   // picked up from resume.json
  fs::path dir;
};

/// Trains every seed of the cell into <out>/<algo>-<reward>/seed-<n>:
/// episodes.csv, evals.csv, manifest.json, final.json and best.json, a
/// 100-episode final evaluation of both checkpoints in final_eval.csv, and
/// resume.json every `resume_interval` episodes while running. Seeds run
/// on up to `parallel` threads. Throws ConfigError.
std::vector<SeedResult> run_training(const ExperimentConfig& config);

/// Greedy policy of a checkpoint holding "q", "policy" or "shared".
/// Throws ShapeError if its networks do not fit the environment.
rl::Policy checkpoint_policy(const nn::Checkpoint& ckpt, int observation_size, int action_count);

/// Untrained checkpoint of the configured algorithm.
nn::Checkpoint initial_checkpoint(const ExperimentConfig& config, std::uint64_t seed);

/// Deterministic evaluation over seeded random color sequences.
rl::EvalStats evaluate_policy(const nn::Checkpoint& ckpt, const env::EnvConfig& env, int n_episodes,
                              std::uint64_t seed);
rl::EvalStats evaluate_policy(const rl::Policy& policy, const env::EnvConfig& env, int n_episodes,
                              std::uint64_t seed);

}  // namespace sortline::harness
