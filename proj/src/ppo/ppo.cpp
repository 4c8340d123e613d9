#include "sortline/ppo/ppo.hpp"

#include <cmath>
#include <numeric>

#include "sortline/errors.hpp"
#include "sortline/nn/checkpoint.hpp"

namespace sortline::ppo {

using nlohmann::json;

void Rollout::clear() {
  observations.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  next_values.clear();
  dones.clear();
  truncateds.clear();
}

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

PpoConfig checked(PpoConfig c) {
  check_config(c);
  return c;
}

}  // namespace

PolicyValue::PolicyValue(int observation_size, int action_count, const PpoConfig& config,
                         std::uint64_t seed)
    : actions_(action_count), shared_(config.shared_trunk) {
  const int policy_out = shared_ ? action_count + 1 : action_count;
  policy = nn::Network(layer_sizes(observation_size, config.hidden, policy_out), derive_seed(seed, 1));
  policy_opt = nn::Adam(policy.parameter_count(), {.learning_rate = config.lr});
  if (!shared_) {
    value_net = nn::Network(layer_sizes(observation_size, config.hidden, 1), derive_seed(seed, 5));
    value_opt = nn::Adam(value_net.parameter_count(), {.learning_rate = config.lr});
  }
}

std::pair<std::vector<double>, double> PolicyValue::evaluate(std::span<const double> observation) {
  auto out = policy.forward(observation);
  if (shared_) {
    const double v = out.back();
    out.pop_back();
    return {std::move(out), v};
  }
  return {std::move(out), value_net.forward(observation)[0]};
}

double PolicyValue::value(std::span<const double> observation) {
  if (shared_) return policy.forward(observation).back();
  return value_net.forward(observation)[0];
}

int sample_categorical(std::span<const double> probs, Rng& gen) {
  const double u = unit_uniform(gen);
  double acc = 0.0;
  int last = 0;
  for (size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last = static_cast<int>(j);
    if (u < acc) return last;
  }
  return last;  // rounding left u above the final cumulative sum
}

UpdateMetrics ppo_update(PolicyValue& pv, const Rollout& ro, const PpoConfig& c, Rng& gen) {
  const size_t n = ro.size();
  if (n == 0) throw ShapeError("empty rollout");
  auto est = gae(ro.rewards, ro.values, ro.next_values, ro.dones, ro.truncateds, c.gamma, c.lambda);
  const auto adv = c.normalize_advantages ? normalize_advantages(est.advantages) : est.advantages;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  const int obs_size = static_cast<int>(ro.observations.front().size());
  std::vector<double> pgrads(pv.policy.parameter_count());
  std::vector<double> vgrads(pv.shared() ? 0 : pv.value_net.parameter_count());

  UpdateMetrics m;
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    for (size_t k = n; k > 1; --k) std::swap(order[k - 1], order[static_cast<size_t>(uniform_index(gen, static_cast<int>(k)))]);
    for (size_t start = 0; start < n; start += static_cast<size_t>(c.minibatch)) {
      const size_t end = std::min(n, start + static_cast<size_t>(c.minibatch));
      const int b = static_cast<int>(end - start);
      nn::Matrix s(b, obs_size);
      LossInputs in;
      for (size_t q = start; q < end; ++q) {
        const size_t i = order[q];
        std::copy(ro.observations[i].begin(), ro.observations[i].end(), s.row(static_cast<int>(q - start)).begin());
        in.actions.push_back(ro.actions[i]);
        in.old_log_probs.push_back(ro.log_probs[i]);
        in.advantages.push_back(adv[i]);
        in.returns.push_back(est.returns[i]);
      }
      LossTerms terms;
      if (pv.shared()) {
        const auto g = composite_loss(pv.policy.forward(s), in, c);
        pv.policy.backward(g.grad, pgrads);
        pv.policy_opt.step(pv.policy.mutable_parameters(), pgrads);
        terms = g.terms;
      } else {
        const auto gp = policy_loss(pv.policy.forward(s), in, c);
        pv.policy.backward(gp.grad, pgrads);
        pv.policy_opt.step(pv.policy.mutable_parameters(), pgrads);
        const auto gv = value_loss(pv.value_net.forward(s), in, c);
        pv.value_net.backward(gv.grad, vgrads);
        pv.value_opt.step(pv.value_net.mutable_parameters(), vgrads);
        terms = gp.terms;
        terms.value_loss = gv.terms.value_loss;
      }
      m.terms.policy_loss += terms.policy_loss;
      m.terms.value_loss += terms.value_loss;
      m.terms.entropy += terms.entropy;
      m.terms.clip_fraction += terms.clip_fraction;
      ++m.minibatches;
    }
  }
  const double inv = 1.0 / m.minibatches;
  m.terms.policy_loss *= inv;
  m.terms.value_loss *= inv;
  m.terms.entropy *= inv;
  m.terms.clip_fraction *= inv;
  return m;
}

PpoAgent::PpoAgent(int observation_size, int action_count, PpoConfig config, std::uint64_t seed)
    : config_(checked(std::move(config))),
      pv_(observation_size, action_count, config_, seed),
      gen_(derive_seed(seed, 2)) {}

rl::EpisodeStats PpoAgent::train_episode(env::Environment& env, std::uint64_t seed) {
  rl::EpisodeStats stats;
  env::Observation obs = env.reset(seed);
  bool awaiting_next = false;  // last rollout entry needs V of the current state
  for (;;) {
    auto [logits, v] = pv_.evaluate(obs);
    if (awaiting_next) {
      rollout_.next_values.back() = v;
      awaiting_next = false;
    }
    const auto logp = log_softmax(logits);
    const auto probs = softmax(logits);
    const int a = sample_categorical(probs, gen_);
    auto r = env.step(a);
    rl::record_step(stats, r);

    rollout_.observations.push_back(std::move(obs));
    rollout_.actions.push_back(a);
    rollout_.log_probs.push_back(logp[static_cast<size_t>(a)]);
    rollout_.rewards.push_back(r.reward);
    rollout_.values.push_back(v);
    rollout_.dones.push_back(r.terminated);
    rollout_.truncateds.push_back(r.truncated);
    double next = 0.0;
    if (r.truncated || (!r.terminated && rollout_.size() >= static_cast<size_t>(config_.horizon)))
      next = pv_.value(r.observation);
    else if (!r.terminated)
      awaiting_next = true;
    rollout_.next_values.push_back(next);

    if (rollout_.size() >= static_cast<size_t>(config_.horizon)) {
      awaiting_next = false;
      last_ = ppo_update(pv_, rollout_, config_, gen_);
      ++updates_;
      rollout_.clear();
    }
    if (r.terminated || r.truncated) break;
    obs = std::move(r.observation);
  }
  ++episodes_;
  return stats;
}

int PpoAgent::act(std::span<const double> observation) {
  return nn::argmax(pv_.evaluate(observation).first);
}

nn::Checkpoint PpoAgent::checkpoint() const {
  nn::Checkpoint c;
  if (pv_.shared()) {
    c.networks.emplace("shared", pv_.policy);
  } else {
    c.networks.emplace("policy", pv_.policy);
    c.networks.emplace("value", pv_.value_net);
  }
  c.meta["algo"] = "ppo";
  return c;
}

json PpoAgent::save_state() const {
  json j{{"algo", "ppo"},
         {"policy", nn::network_to_json(pv_.policy)},
         {"policy_opt", nn::adam_to_json(pv_.policy_opt)},
         {"updates", updates_},
         {"episodes", episodes_},
         {"rng", rng_state(gen_)}};
  if (!pv_.shared()) {
    j["value"] = nn::network_to_json(pv_.value_net);
    j["value_opt"] = nn::adam_to_json(pv_.value_opt);
  }
  return j;
}

void PpoAgent::load_state(const json& state) {
  if (state.value("algo", "") != "ppo") throw ConfigError("resume state is not from a PPO run");
  auto policy = nn::network_from_json(state.at("policy"));
  if (policy.sizes() != pv_.policy.sizes()) throw ShapeError("resume state has other layer sizes");
  pv_.policy = std::move(policy);
  pv_.policy_opt = nn::adam_from_json(state.at("policy_opt"), pv_.policy.parameter_count());
  if (!pv_.shared()) {
    pv_.value_net = nn::network_from_json(state.at("value"));
    pv_.value_opt = nn::adam_from_json(state.at("value_opt"), pv_.value_net.parameter_count());
  }
  updates_ = state.at("updates").get<int>();
  episodes_ = state.at("episodes").get<std::int64_t>();
  restore_rng(gen_, state.at("rng").get<std::string>());
  rollout_.clear();
}

rl::TrainResult ppo_train(const std::function<std::unique_ptr<env::Environment>()>& make_env,
                          const PpoConfig& config, const rl::LoopConfig& loop,
                          const rl::LoopHooks& hooks) {
  auto train_env = make_env();
  auto eval_env = make_env();
  PpoAgent agent(train_env->observation_size(), train_env->action_count(), config, loop.seed);
  return rl::run_loop(agent, *train_env, *eval_env, loop, hooks);
}

}  // namespace sortline::ppo
