#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sortline/dqn/dqn.hpp"
#include "sortline/env/sorting_env.hpp"
#include "sortline/ppo/ppo.hpp"

namespace sortline::harness {

enum class Algo { dqn, ppo };

std::string_view to_string(Algo a);
/// Throws ConfigError on anything but "dqn" or "ppo".
Algo parse_algo(std::string_view s);

inline constexpr int kDefaultEpisodes = 20'000;
inline constexpr int kFinalEvalEpisodes = 100;
inline constexpr int kResumeInterval = 1'000;
inline constexpr int kSmoothWindow = 200;

/// One experiment cell (algorithm and reward variant) over a seed set.
struct ExperimentConfig {
  Algo algo = Algo::ppo;
  env::RewardVariant reward = env::RewardVariant::r1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int episodes = kDefaultEpisodes;
  int eval_interval = rl::kEvalInterval;
  int eval_episodes = rl::kEvalEpisodes;
  int final_eval_episodes = kFinalEvalEpisodes;
  int resume_interval = kResumeInterval;
  std::string out = "runs";
  int parallel = 1;
  env::EnvConfig env;
  dqn::DqnConfig dqn;
  ppo::PpoConfig ppo;

  [[nodiscard]] env::EnvConfig env_config() const;
  /// Range checks on every field. Throws ConfigError.
  void check() const;
};

/// Kebab-case document with every key present.
nlohmann::json to_json(const ExperimentConfig& c);

/// Strict parse: unknown keys and wrong types are ConfigErrors; missing
/// keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Reads a JSON config file. Throws ConfigError when unreadable.
ExperimentConfig load_config(const std::string& path);

/// Environment lookup used for overrides; returns nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_environment();

/// Applies SORTLINE_<KEY> overrides to the top-level keys of a config
/// document, e.g. SORTLINE_EPISODES=500 or SORTLINE_SEEDS=1,2. Values are
/// read as JSON when they parse, as strings otherwise.
void apply_env_overrides(nlohmann::json& doc, const EnvLookup& lookup);

/// "1,2,3" -> {1, 2, 3}. Throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(std::string_view s);

/// Hex digest of everything that influences the results of `seed`: output
/// location, parallelism and the rest of the seed list are left out.
std::string config_hash(const ExperimentConfig& c, std::uint64_t seed);

}  // namespace sortline::harness
