#include "sortline/rl/loop.hpp"

#include <chrono>

#include "sortline/errors.hpp"
#include "sortline/random.hpp"

namespace sortline::rl {

void record_step(EpisodeStats& stats, const env::StepResult& r) {
  stats.reward += r.reward;
  stats.length += 1;
  stats.correct = r.info.products_correct;
  stats.missorted = r.info.products_missorted;
  stats.n_products = r.info.n_products;
  stats.collision = stats.collision || r.info.event == env::EventKind::collision;
  stats.success = r.terminated && r.info.event == env::EventKind::goal_reached;
}

EpisodeStats run_episode(env::Environment& env, const Policy& policy, std::uint64_t seed) {
  EpisodeStats stats;
  env::Observation obs = env.reset(seed);
  for (;;) {
    auto r = env.step(policy(obs));
    record_step(stats, r);
    if (r.terminated || r.truncated) break;
    obs = std::move(r.observation);
  }
  return stats;
}

std::vector<EpisodeStats> evaluate_episodes(env::Environment& env, const Policy& policy, int n,
                                            std::uint64_t seed) {
  if (n < 1) throw ConfigError("evaluation needs at least one episode");
  std::vector<EpisodeStats> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    out.push_back(run_episode(env, policy, derive_seed(seed, 0, static_cast<std::uint64_t>(k))));
  return out;
}

EvalStats summarize(const std::vector<EpisodeStats>& episodes) {
  EvalStats out;
  out.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return out;
  int successes = 0;
  double success_len = 0.0;
  for (const auto& s : episodes) {
    if (s.success) {
      ++successes;
      success_len += s.length;
    }
    // environments without products count success as fully sorted
    out.correct_pct += s.n_products > 0 ? 100.0 * s.correct / s.n_products : (s.success ? 100.0 : 0.0);
  }
  out.success_pct = 100.0 * successes / out.episodes;
  out.correct_pct /= out.episodes;
  if (successes > 0) out.success_length = success_len / successes;
  return out;
}

EvalStats evaluate(env::Environment& env, const Policy& policy, int n, std::uint64_t seed) {
  return summarize(evaluate_episodes(env, policy, n, seed));
}

bool better_eval(const EvalStats& a, const std::optional<EvalStats>& incumbent) {
  if (!incumbent) return true;
  if (a.success_pct != incumbent->success_pct) return a.success_pct > incumbent->success_pct;
  return a.correct_pct > incumbent->correct_pct;
}

std::uint64_t training_episode_seed(std::uint64_t run_seed, int episode) {
  return derive_seed(run_seed, 3, static_cast<std::uint64_t>(episode));
}

std::uint64_t evaluation_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 4); }

TrainResult run_loop(Agent& agent, env::Environment& train_env, env::Environment& eval_env,
                     const LoopConfig& config, const LoopHooks& hooks, const LoopStart& start) {
  if (config.episodes < 0) throw ConfigError("episode budget must be non-negative");
  if (config.eval_interval < 1) throw ConfigError("evaluation interval must be positive");
  TrainResult result;
  result.best = start.best;
  const Policy greedy = [&agent](std::span<const double> o) { return agent.act(o); };
  for (int e = start.episode; e < config.episodes; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    EpisodeRow row;
    row.episode = e;
    row.stats = agent.train_episode(train_env, training_episode_seed(config.seed, e));
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.record.episodes.push_back(row);
    if (hooks.on_episode) hooks.on_episode(row);

    if ((e + 1) % config.eval_interval != 0) continue;
    EvalRow ev{e + 1, evaluate(eval_env, greedy, config.eval_episodes, evaluation_seed(config.seed))};
    const bool improved = better_eval(ev.stats, result.best);
    if (improved) {
      result.best = ev.stats;
      result.best_checkpoint = agent.checkpoint();
      result.best_checkpoint.meta["episode"] = ev.episode;
    }
    result.record.evals.push_back(ev);
    if (hooks.on_eval) hooks.on_eval(ev, agent, improved);
  }
  result.final_checkpoint = agent.checkpoint();
  result.final_checkpoint.meta["episode"] = config.episodes;
  return result;
}

}  // namespace sortline::rl
