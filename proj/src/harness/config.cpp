#include "sortline/harness/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include "sortline/errors.hpp"

namespace sortline::harness {

using nlohmann::json;

std::string_view to_string(Algo a) { return a == Algo::dqn ? "dqn" : "ppo"; }

Algo parse_algo(std::string_view s) {
  if (s == "dqn") return Algo::dqn;
  if (s == "ppo") return Algo::ppo;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected dqn or ppo)");
}

env::EnvConfig ExperimentConfig::env_config() const {
  env::EnvConfig e = env;
  e.reward = reward;
  return e;
}

void ExperimentConfig::check() const {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  for (size_t i = 0; i < seeds.size(); ++i)
    for (size_t k = 0; k < i; ++k)
      if (seeds[i] == seeds[k]) throw ConfigError("seed " + std::to_string(seeds[i]) + " listed twice");
  if (episodes < 1) throw ConfigError("episodes must be positive");
  if (eval_interval < 1 || eval_episodes < 1 || final_eval_episodes < 1)
    throw ConfigError("evaluation interval and episode counts must be positive");
  if (resume_interval < 1) throw ConfigError("resume-interval must be positive");
  if (parallel < 1) throw ConfigError("parallel must be at least 1");
  if (out.empty()) throw ConfigError("output directory is empty");
  env::SortingEnv probe(env_config());  // throws on bad durations or counts
  ppo::check_config(ppo);
  if (dqn.batch_size < 1 || dqn.buffer_capacity < 1 || dqn.sync_interval < 1)
    throw ConfigError("dqn batch size, buffer capacity and sync interval must be positive");
  if (dqn.gamma < 0.0 || dqn.gamma > 1.0) throw ConfigError("dqn gamma must lie in [0, 1]");
  if (dqn.lr <= 0.0 || dqn.huber_delta <= 0.0) throw ConfigError("dqn lr and huber-delta must be positive");
  if (dqn.eps_span < 0) throw ConfigError("eps-span must be non-negative");
  for (int h : dqn.hidden)
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
  for (int h : ppo.hidden)
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
}

json to_json(const ExperimentConfig& c) {
  const auto& d = c.dqn;
  const auto& p = c.ppo;
  return json{
      {"algo", to_string(c.algo)},
      {"reward", env::to_string(c.reward)},
      {"seeds", c.seeds},
      {"episodes", c.episodes},
      {"eval-interval", c.eval_interval},
      {"eval-episodes", c.eval_episodes},
      {"final-eval-episodes", c.final_eval_episodes},
      {"resume-interval", c.resume_interval},
      {"out", c.out},
      {"parallel", c.parallel},
      {"env",
       {{"n-products", c.env.n_products},
        {"max-steps", c.env.max_steps},
        {"durations", c.env.factory.durations}}},
      {"dqn",
       {{"gamma", d.gamma},
        {"buffer-capacity", d.buffer_capacity},
        {"batch-size", d.batch_size},
        {"warmup", d.warmup},
        {"sync-interval", d.sync_interval},
        {"lr", d.lr},
        {"eps-start", d.eps_start},
        {"eps-end", d.eps_end},
        {"eps-span", d.eps_span},
        {"huber-delta", d.huber_delta},
        {"hidden", d.hidden}}},
      {"ppo",
       {{"clip-eps", p.clip_eps},
        {"gamma", p.gamma},
        {"lambda", p.lambda},
        {"epochs", p.epochs},
        {"minibatch", p.minibatch},
        {"horizon", p.horizon},
        {"value-coef", p.value_coef},
        {"entropy-coef", p.entropy_coef},
        {"lr", p.lr},
        {"shared-trunk", p.shared_trunk},
        {"normalize-advantages", p.normalize_advantages},
        {"hidden", p.hidden}}},
  };
}

namespace {

using Setter = std::function<void(const json&)>;

[[noreturn]] void type_error(const std::string& key, const char* want) {
  throw ConfigError("key '" + key + "' must be " + want);
}

template <class T>
Setter integer(const std::string& key, T& dst) {
  return [&dst, key](const json& v) {
    if (!v.is_number_integer()) type_error(key, "an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
        dst = v.get<T>();
        return;
      }
      type_error(key, "non-negative");
    } else {
      dst = v.get<T>();
    }
  };
}

Setter real(const std::string& key, double& dst) {
  return [&dst, key](const json& v) {
    if (!v.is_number()) type_error(key, "a number");
    dst = v.get<double>();
  };
}

Setter boolean(const std::string& key, bool& dst) {
  return [&dst, key](const json& v) {
    if (!v.is_boolean()) type_error(key, "true or false");
    dst = v.get<bool>();
  };
}

template <class T>
Setter int_list(const std::string& key, T& dst) {
  return [&dst, key](const json& v) {
    if (!v.is_array()) type_error(key, "an array of integers");
    T out{};
    if constexpr (requires { out.push_back(0); }) {
      for (const auto& x : v) {
        if (!x.is_number_integer()) type_error(key, "an array of integers");
        out.push_back(x.get<typename T::value_type>());
      }
    } else {
      if (v.size() != out.size()) throw ConfigError("key '" + key + "' needs " + std::to_string(out.size()) + " entries");
      for (size_t i = 0; i < out.size(); ++i) {
        if (!v[i].is_number_integer()) type_error(key, "an array of integers");
        out[i] = v[i].get<typename T::value_type>();
      }
    }
    dst = out;
  };
}

void apply(const json& obj, const std::string& where, const std::map<std::string, Setter>& setters) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + key + "' in " + where);
    it->second(value);
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  auto& d = c.dqn;
  auto& p = c.ppo;
  std::map<std::string, Setter> env_keys{
      {"n-products", integer("n-products", c.env.n_products)},
      {"max-steps", integer("max-steps", c.env.max_steps)},
      {"durations", int_list("durations", c.env.factory.durations)},
  };
  std::map<std::string, Setter> dqn_keys{
      {"gamma", real("gamma", d.gamma)},
      {"buffer-capacity", integer("buffer-capacity", d.buffer_capacity)},
      {"batch-size", integer("batch-size", d.batch_size)},
      {"warmup", integer("warmup", d.warmup)},
      {"sync-interval", integer("sync-interval", d.sync_interval)},
      {"lr", real("lr", d.lr)},
      {"eps-start", real("eps-start", d.eps_start)},
      {"eps-end", real("eps-end", d.eps_end)},
      {"eps-span", integer("eps-span", d.eps_span)},
      {"huber-delta", real("huber-delta", d.huber_delta)},
      {"hidden", int_list("hidden", d.hidden)},
  };
  std::map<std::string, Setter> ppo_keys{
      {"clip-eps", real("clip-eps", p.clip_eps)},
      {"gamma", real("gamma", p.gamma)},
      {"lambda", real("lambda", p.lambda)},
      {"epochs", integer("epochs", p.epochs)},
      {"minibatch", integer("minibatch", p.minibatch)},
      {"horizon", integer("horizon", p.horizon)},
      {"value-coef", real("value-coef", p.value_coef)},
      {"entropy-coef", real("entropy-coef", p.entropy_coef)},
      {"lr", real("lr", p.lr)},
      {"shared-trunk", boolean("shared-trunk", p.shared_trunk)},
      {"normalize-advantages", boolean("normalize-advantages", p.normalize_advantages)},
      {"hidden", int_list("hidden", p.hidden)},
  };
  std::map<std::string, Setter> top{
      {"algo",
       [&c](const json& v) {
         if (!v.is_string()) type_error("algo", "a string");
         c.algo = parse_algo(v.get<std::string>());
       }},
      {"reward",
       [&c](const json& v) {
         if (!v.is_string()) type_error("reward", "a string");
         c.reward = env::parse_reward_variant(v.get<std::string>());
       }},
      {"seeds", int_list("seeds", c.seeds)},
      {"episodes", integer("episodes", c.episodes)},
      {"eval-interval", integer("eval-interval", c.eval_interval)},
      {"eval-episodes", integer("eval-episodes", c.eval_episodes)},
      {"final-eval-episodes", integer("final-eval-episodes", c.final_eval_episodes)},
      {"resume-interval", integer("resume-interval", c.resume_interval)},
      {"out",
       [&c](const json& v) {
         if (!v.is_string()) type_error("out", "a string");
         c.out = v.get<std::string>();
       }},
      {"parallel", integer("parallel", c.parallel)},
      {"env", [&](const json& v) { apply(v, "env", env_keys); }},
      {"dqn", [&](const json& v) { apply(v, "dqn", dqn_keys); }},
      {"ppo", [&](const json& v) { apply(v, "ppo", ppo_keys); }},
  };
  try {
    apply(j, "config", top);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value out of range: ") + e.what());
  }
  c.check();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  apply_env_overrides(doc, process_environment());
  return config_from_json(doc);
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t comma = std::min(s.find(',', start), s.size());
    std::string item(s.substr(start, comma - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad seed list '" + std::string(s) + "'");
    out.push_back(std::stoull(item));
    start = comma + 1;
  }
  return out;
}

void apply_env_overrides(json& doc, const EnvLookup& lookup) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const char* kKeys[] = {"algo",   "reward",      "seeds",         "episodes",
                                "eval-interval", "eval-episodes", "final-eval-episodes",
                                "resume-interval", "out", "parallel"};
  for (const char* key : kKeys) {
    std::string name = "SORTLINE_";
    for (const char* k = key; *k != '\0'; ++k)
      name += *k == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(*k)));
    const auto value = lookup(name);
    if (!value) continue;
    if (std::string_view(key) == "seeds") {
      const auto seeds = parse_seed_list(*value);
      doc[key] = seeds;
      continue;
    }
    const auto parsed = json::parse(*value, nullptr, false);
    doc[key] = parsed.is_discarded() ? json(*value) : parsed;
  }
}

std::string config_hash(const ExperimentConfig& c, std::uint64_t seed) {
  auto j = to_json(c);
  j.erase("out");
  j.erase("parallel");
  j.erase("seeds");
  j["seed"] = seed;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

}  // namespace sortline::harness
