#include "sortline/harness/training.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "sortline/errors.hpp"
#include "sortline/io.hpp"
#include "sortline/version.hpp"

namespace sortline::harness {

using nlohmann::json;

fs::path cell_dir(const fs::path& out, Algo algo, env::RewardVariant reward) {
  return out / (std::string(to_string(algo)) + "-" + std::string(env::to_string(reward)));
}

fs::path seed_dir(const fs::path& cell, std::uint64_t seed) {
  return cell / ("seed-" + std::to_string(seed));
}

namespace {

std::string num(double v) { return format_double(v); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::string_view header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw ConfigError("unexpected CSV header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

constexpr std::string_view kEpisodesHeader = "episode,reward,length,success,correct,missort,collision";
constexpr std::string_view kEvalsHeader = "episode,eval_success,eval_correct_pct,eval_len_mean";
constexpr std::string_view kFinalHeader = "checkpoint,episode,success,correct,n_products,length";

json eval_to_json(const rl::EvalStats& s) {
  json j{{"episodes", s.episodes}, {"success_pct", s.success_pct}, {"correct_pct", s.correct_pct}};
  j["success_length"] = s.success_length ? json(*s.success_length) : json(nullptr);
  return j;
}

rl::EvalStats eval_from_json(const json& j) {
  rl::EvalStats s;
  s.episodes = j.at("episodes").get<int>();
  s.success_pct = j.at("success_pct").get<double>();
  s.correct_pct = j.at("correct_pct").get<double>();
  if (!j.at("success_length").is_null()) s.success_length = j.at("success_length").get<double>();
  return s;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json versions() {
  return json{{"sortline", kVersion},
              {"compiler", __VERSION__},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

struct SeedPaths {
  fs::path dir;
  fs::path episodes, evals, manifest, final_ckpt, best_ckpt, final_eval, resume;
  explicit SeedPaths(fs::path d)
      : dir(std::move(d)),
        episodes(dir / "episodes.csv"),
        evals(dir / "evals.csv"),
        manifest(dir / "manifest.json"),
        final_ckpt(dir / "final.json"),
        best_ckpt(dir / "best.json"),
        final_eval(dir / "final_eval.csv"),
        resume(dir / "resume.json") {}
};

bool complete_with(const SeedPaths& p, const std::string& hash) {
  if (!fs::exists(p.manifest)) return false;
  try {
    const auto m = read_json_file(p.manifest);
    return m.value("status", "") == "complete" && m.value("config_hash", "") == hash;
  } catch (const std::exception&) {
    return false;
  }
}

std::mutex log_mutex;

void log_line(const std::string& s) {
  std::lock_guard lock(log_mutex);
  std::clog << s << std::endl;
}

SeedResult run_seed(const ExperimentConfig& c, std::uint64_t seed, const fs::path& cell) {
  SeedResult res;
  res.seed = seed;
  const SeedPaths p(seed_dir(cell, seed));
  res.dir = p.dir;
  const std::string hash = config_hash(c, seed);
  const std::string tag = cell.filename().string() + " seed " + std::to_string(seed);
  if (complete_with(p, hash)) {
    res.skipped = true;
    log_line("[" + tag + "] complete, skipped");
    return res;
  }
  fs::create_directories(p.dir);

  auto agent = make_agent(c, seed);
  const auto env_cfg = c.env_config();
  env::SortingEnv train_env(env_cfg);
  env::SortingEnv eval_env(env_cfg);

  rl::RunRecord rec;
  rl::LoopStart start;
  if (fs::exists(p.resume)) {
    try {
      const auto r = read_json_file(p.resume);
      if (r.at("config_hash").get<std::string>() == hash) {
        agent->load_state(r.at("agent"));
        start.episode = r.at("episode").get<int>();
        if (!r.at("best").is_null()) start.best = eval_from_json(r.at("best"));
        for (auto& row : parse_episodes_csv(read_text(p.episodes)))
          if (row.episode < start.episode) rec.episodes.push_back(row);
        for (auto& row : parse_evals_csv(read_text(p.evals)))
          if (row.episode <= start.episode) rec.evals.push_back(row);
        res.resumed = true;
      }
    } catch (const std::exception& e) {
      log_line("[" + tag + "] ignoring unusable resume state: " + e.what());
      agent = make_agent(c, seed);
      rec = {};
      start = {};
    }
  }
  if (!res.resumed)
    for (const auto& f : {p.episodes, p.evals, p.final_ckpt, p.best_ckpt, p.final_eval, p.resume})
      fs::remove(f);

  json manifest{{"format", kManifestFormat},
                {"version", kManifestVersion},
                {"algo", to_string(c.algo)},
                {"reward", env::to_string(c.reward)},
                {"seed", seed},
                {"config_hash", hash},
                {"config", to_json(c)},
                {"versions", versions()},
                {"status", "running"}};
  manifest["config"].erase("out");
  manifest["config"].erase("parallel");
  manifest["config"]["seeds"] = json::array({seed});
  write_file_atomic(p.manifest, manifest.dump(2) + "\n");

  const auto t_start = std::chrono::steady_clock::now();
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
  std::optional<rl::EvalStats> best = start.best;

  auto save_resume = [&](int completed) {
    if (completed % c.resume_interval != 0 || completed >= c.episodes) return;
    write_file_atomic(p.episodes, episodes_csv(rec.episodes));
    write_file_atomic(p.evals, evals_csv(rec.evals));
    json r{{"config_hash", hash},
           {"episode", completed},
           {"best", best ? eval_to_json(*best) : json(nullptr)},
           {"agent", agent->save_state()}};
    write_file_atomic(p.resume, r.dump());
    std::string msg = "[" + tag + "] episode " + std::to_string(completed) + "/" + std::to_string(c.episodes);
    if (!rec.evals.empty())
      msg += ", eval success " + num(rec.evals.back().stats.success_pct) + "%, correct " +
             num(rec.evals.back().stats.correct_pct) + "%";
    log_line(msg);
  };

  rl::LoopHooks hooks;
  hooks.on_episode = [&](const rl::EpisodeRow& row) {
    rec.episodes.push_back(row);
    train_seconds += row.wall_seconds;
    const int completed = row.episode + 1;
    // an evaluation is due at this episode: checkpoint after it instead
    if (completed % c.eval_interval != 0) save_resume(completed);
  };
  hooks.on_eval = [&](const rl::EvalRow& row, const rl::Agent& a, bool improved) {
    rec.evals.push_back(row);
    if (improved) {
      best = row.stats;
      auto ck = a.checkpoint();
      ck.meta["episode"] = row.episode;
      nn::save_checkpoint(ck, p.best_ckpt);
    }
    save_resume(row.episode);
  };

  rl::LoopConfig loop{c.episodes, c.eval_interval, c.eval_episodes, seed};
  auto result = rl::run_loop(*agent, train_env, eval_env, loop, hooks, start);
  nn::save_checkpoint(result.final_checkpoint, p.final_ckpt);
  if (!fs::exists(p.best_ckpt)) nn::save_checkpoint(result.final_checkpoint, p.best_ckpt);

  // final evaluation of both checkpoints on fresh seeded color sequences
  const auto t_eval = std::chrono::steady_clock::now();
  std::string final_csv = std::string(kFinalHeader) + "\n";
  json final_json;
  for (const auto& [name, path] : {std::pair{"final", p.final_ckpt}, std::pair{"best", p.best_ckpt}}) {
    const auto ck = nn::load_checkpoint(path);
    const auto policy = checkpoint_policy(ck, train_env.observation_size(), train_env.action_count());
    const auto eps = rl::evaluate_episodes(eval_env, policy, c.final_eval_episodes, derive_seed(seed, 6));
    for (size_t k = 0; k < eps.size(); ++k) {
      const auto& s = eps[k];
      final_csv += std::string(name) + "," + std::to_string(k) + "," + (s.success ? "1" : "0") + "," +
                   std::to_string(s.correct) + "," + std::to_string(s.n_products) + "," +
                   std::to_string(s.length) + "\n";
    }
    final_json[name] = eval_to_json(rl::summarize(eps));
    final_json[name]["checkpoint_episode"] = ck.meta.value("episode", 0);
  }
  eval_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_eval).count();

  write_file_atomic(p.episodes, episodes_csv(rec.episodes));
  write_file_atomic(p.evals, evals_csv(rec.evals));
  write_file_atomic(p.final_eval, final_csv);
  manifest["status"] = "complete";
  manifest["episodes_completed"] = c.episodes;
  manifest["resumed"] = res.resumed;
  manifest["final_evaluation"] = final_json;
  manifest["durations"] = {
      {"train_seconds", train_seconds},
      {"final_eval_seconds", eval_seconds},
      {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()}};
  write_file_atomic(p.manifest, manifest.dump(2) + "\n");
  fs::remove(p.resume);
  log_line("[" + tag + "] done, best checkpoint success " + num(final_json["best"]["success_pct"].get<double>()) +
           "% over " + std::to_string(c.final_eval_episodes) + " episodes");
  return res;
}

}  // namespace

std::string episodes_csv(const std::vector<rl::EpisodeRow>& rows) {
  std::string out = std::string(kEpisodesHeader) + "\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    out += std::to_string(r.episode + 1) + "," + num(s.reward) + "," + std::to_string(s.length) + "," +
           (s.success ? "1" : "0") + "," + std::to_string(s.correct) + "," + std::to_string(s.missorted) +
           "," + (s.collision ? "1" : "0") + "\n";
  }
  return out;
}

std::string evals_csv(const std::vector<rl::EvalRow>& rows) {
  std::string out = std::string(kEvalsHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.episode) + "," + num(r.stats.success_pct) + "," + num(r.stats.correct_pct) + "," +
           (r.stats.success_length ? num(*r.stats.success_length) : "") + "\n";
  }
  return out;
}

std::vector<rl::EpisodeRow> parse_episodes_csv(const std::string& text) {
  std::vector<rl::EpisodeRow> out;
  for (const auto& c : csv_rows(text, kEpisodesHeader)) {
    if (c.size() != 7) throw ConfigError("episodes.csv row has " + std::to_string(c.size()) + " fields");
    rl::EpisodeRow r;
    r.episode = std::stoi(c[0]) - 1;
    r.stats.reward = std::stod(c[1]);
    r.stats.length = std::stoi(c[2]);
    r.stats.success = c[3] == "1";
    r.stats.correct = std::stoi(c[4]);
    r.stats.missorted = std::stoi(c[5]);
    r.stats.collision = c[6] == "1";
    out.push_back(r);
  }
  return out;
}

std::vector<rl::EvalRow> parse_evals_csv(const std::string& text) {
  std::vector<rl::EvalRow> out;
  for (const auto& c : csv_rows(text, kEvalsHeader)) {
    if (c.size() != 4) throw ConfigError("evals.csv row has " + std::to_string(c.size()) + " fields");
    rl::EvalRow r;
    r.episode = std::stoi(c[0]);
    r.stats.success_pct = std::stod(c[1]);
    r.stats.correct_pct = std::stod(c[2]);
    if (!c[3].empty()) r.stats.success_length = std::stod(c[3]);
    out.push_back(r);
  }
  return out;
}

std::unique_ptr<rl::Agent> make_agent(const ExperimentConfig& c, std::uint64_t seed) {
  const int obs = factory::kObservationSize;
  const int actions = factory::kActionCount;
  if (c.algo == Algo::dqn) return std::make_unique<dqn::DqnAgent>(obs, actions, c.dqn, c.episodes, seed);
  return std::make_unique<ppo::PpoAgent>(obs, actions, c.ppo, seed);
}

std::vector<SeedResult> run_training(const ExperimentConfig& config) {
  config.check();
  const fs::path cell = cell_dir(config.out, config.algo, config.reward);
  fs::create_directories(cell);
  const int n = static_cast<int>(config.seeds.size());
  std::vector<SeedResult> results(static_cast<size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(config.parallel)
  for (int i = 0; i < n; ++i) {
    try {
      results[static_cast<size_t>(i)] = run_seed(config, config.seeds[static_cast<size_t>(i)], cell);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

rl::Policy checkpoint_policy(const nn::Checkpoint& ckpt, int observation_size, int action_count) {
  const auto& nets = ckpt.networks;
  std::string name;
  int expected_out = action_count;
  if (nets.count("q") != 0) {
    name = "q";
  } else if (nets.count("policy") != 0) {
    name = "policy";
  } else if (nets.count("shared") != 0) {
    name = "shared";
    expected_out = action_count + 1;
  } else {
    throw ShapeError("checkpoint holds no q, policy or shared network");
  }
  auto net = std::make_shared<nn::Network>(nets.at(name));
  if (net->input_size() != observation_size || net->output_size() != expected_out)
    throw ShapeError("checkpoint network '" + name + "' maps " + std::to_string(net->input_size()) + " -> " +
                     std::to_string(net->output_size()) + ", environment needs " +
                     std::to_string(observation_size) + " -> " + std::to_string(expected_out));
  return [net, action_count](std::span<const double> obs) {
    const auto out = net->forward(obs);
    return nn::argmax(std::span<const double>(out).first(static_cast<size_t>(action_count)));
  };
}

nn::Checkpoint initial_checkpoint(const ExperimentConfig& config, std::uint64_t seed) {
  return make_agent(config, seed)->checkpoint();
}

rl::EvalStats evaluate_policy(const rl::Policy& policy, const env::EnvConfig& env_cfg, int n_episodes,
                              std::uint64_t seed) {
  if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
  env::SortingEnv env(env_cfg);
  return rl::evaluate(env, policy, n_episodes, seed);
}

rl::EvalStats evaluate_policy(const nn::Checkpoint& ckpt, const env::EnvConfig& env_cfg, int n_episodes,
                              std::uint64_t seed) {
  if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
  return evaluate_policy(checkpoint_policy(ckpt, factory::kObservationSize, factory::kActionCount), env_cfg,
                         n_episodes, seed);
}

}  // namespace sortline::harness
