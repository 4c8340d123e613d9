#include "sortline/dqn/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "sortline/errors.hpp"

namespace sortline::dqn {

using nlohmann::json;

double EpsilonSchedule::value(std::int64_t step) const {
  if (span <= 0) return end;
  const double frac = std::min(static_cast<double>(std::max<std::int64_t>(step, 0)) / static_cast<double>(span), 1.0);
  return start + (end - start) * frac;
}

int select_action(nn::Network& q, std::span<const double> s, double eps, Rng& gen) {
  const double u = unit_uniform(gen);
  if (u < eps) return uniform_index(gen, q.output_size());
  return nn::argmax(q.forward(s));
}

namespace {

nn::Matrix stack(std::span<const Experience* const> batch, bool next) {
  const int cols = static_cast<int>((next ? batch[0]->s_next : batch[0]->s).size());
  nn::Matrix m(static_cast<int>(batch.size()), cols);
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i]->s_next : batch[i]->s;
    if (static_cast<int>(v.size()) != cols) throw ShapeError("ragged observations in a batch");
    std::copy(v.begin(), v.end(), m.row(static_cast<int>(i)).begin());
  }
  return m;
}

}  // namespace

std::vector<double> td_targets(std::span<const Experience* const> batch, nn::Network& target,
                               double gamma) {
  std::vector<double> y(batch.size());
  if (batch.empty()) return y;
  const nn::Matrix& q = target.forward(stack(batch, true));
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto row = q.row(static_cast<int>(i));
    y[i] = batch[i]->done ? batch[i]->r : batch[i]->r + gamma * *std::max_element(row.begin(), row.end());
  }
  return y;
}

QLoss huber_q_loss(const nn::Matrix& q, std::span<const int> actions,
                   std::span<const double> targets, double delta) {
  if (actions.size() != static_cast<size_t>(q.rows) || targets.size() != actions.size())
    throw ShapeError("Q batch, actions and targets disagree in length");
  QLoss out;
  out.grad = nn::Matrix(q.rows, q.cols);
  const double inv = 1.0 / q.rows;
  for (int i = 0; i < q.rows; ++i) {
    const int a = actions[static_cast<size_t>(i)];
    const double d = q(i, a) - targets[static_cast<size_t>(i)];
    const double ad = std::abs(d);
    out.value += (ad <= delta ? 0.5 * d * d : delta * (ad - 0.5 * delta)) * inv;
    out.grad(i, a) = std::clamp(d, -delta, delta) * inv;
  }
  return out;
}

DqnLearner::DqnLearner(int observation_size, int action_count, const DqnConfig& config,
                       std::uint64_t seed) {
  std::vector<int> sizes{observation_size};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(action_count);
  online = nn::Network(sizes, seed);
  target = online;
  optimizer = nn::Adam(online.parameter_count(), {.learning_rate = config.lr});
}

double dqn_update(DqnLearner& learner, const ReplayBuffer& buffer, const DqnConfig& config,
                  Rng& gen) {
  if (buffer.size() < std::max<std::size_t>(config.warmup, 1))
    throw BufferTooSmall("replay holds " + std::to_string(buffer.size()) + " items, warmup needs " +
                         std::to_string(config.warmup));
  const auto batch = buffer.sample(static_cast<size_t>(config.batch_size), gen);
  const auto y = td_targets(batch, learner.target, config.gamma);
  std::vector<int> actions(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) actions[i] = batch[i]->a;

  const nn::Matrix& q = learner.online.forward(stack(batch, false));
  const QLoss loss = huber_q_loss(q, actions, y, config.huber_delta);
  thread_local std::vector<double> grads;
  grads.resize(learner.online.parameter_count());
  learner.online.backward(loss.grad, grads);
  learner.optimizer.step(learner.online.mutable_parameters(), grads);
  ++learner.updates;
  if (config.sync_interval > 0 && learner.updates % config.sync_interval == 0)
    learner.target.copy_parameters_from(learner.online);
  return loss.value;
}

DqnAgent::DqnAgent(int observation_size, int action_count, DqnConfig config, int episode_budget,
                   std::uint64_t seed)
    : config_(std::move(config)),
      learner_(observation_size, action_count, config_, derive_seed(seed, 1)),
      buffer_(config_.buffer_capacity),
      gen_(derive_seed(seed, 2)) {
  if (config_.batch_size < 1) throw ConfigError("batch size must be positive");
  if (config_.gamma < 0.0 || config_.gamma >= 1.0) throw ConfigError("gamma must lie in [0, 1)");
  if (config_.eps_end < 0.0 || config_.eps_start > 1.0 || config_.eps_end > config_.eps_start)
    throw ConfigError("epsilon must decay within [0, 1]");
  schedule_ = {config_.eps_start, config_.eps_end,
               config_.eps_span > 0 ? config_.eps_span : std::max(episode_budget / 2, 1)};
}

rl::EpisodeStats DqnAgent::train_episode(env::Environment& env, std::uint64_t seed) {
  const double eps = schedule_.value(episodes_);
  rl::EpisodeStats stats;
  env::Observation obs = env.reset(seed);
  for (;;) {
    const int a = select_action(learner_.online, obs, eps, gen_);
    auto r = env.step(a);
    rl::record_step(stats, r);
    const bool over = r.terminated || r.truncated;
    buffer_.push({std::move(obs), a, r.reward, r.observation, r.terminated});
    if (buffer_.size() >= config_.warmup) last_loss_ = dqn_update(learner_, buffer_, config_, gen_);
    if (over) break;
    obs = std::move(r.observation);
  }
  ++episodes_;
  return stats;
}

int DqnAgent::act(std::span<const double> observation) {
  return nn::argmax(learner_.online.forward(observation));
}

nn::Checkpoint DqnAgent::checkpoint() const {
  nn::Checkpoint c;
  c.networks.emplace("q", learner_.online);
  c.meta["algo"] = "dqn";
  return c;
}

json DqnAgent::save_state() const {
  return {{"algo", "dqn"},
          {"online", nn::network_to_json(learner_.online)},
          {"target", nn::network_to_json(learner_.target)},
          {"optimizer", nn::adam_to_json(learner_.optimizer)},
          {"updates", learner_.updates},
          {"episodes", episodes_},
          {"rng", rng_state(gen_)}};
}

void DqnAgent::load_state(const json& state) {
  if (state.value("algo", "") != "dqn") throw ConfigError("resume state is not from a DQN run");
  auto online = nn::network_from_json(state.at("online"));
  if (online.sizes() != learner_.online.sizes()) throw ShapeError("resume state has other layer sizes");
  learner_.online = std::move(online);
  learner_.target = nn::network_from_json(state.at("target"));
  learner_.optimizer = nn::adam_from_json(state.at("optimizer"), learner_.online.parameter_count());
  learner_.updates = state.at("updates").get<std::int64_t>();
  episodes_ = state.at("episodes").get<std::int64_t>();
  restore_rng(gen_, state.at("rng").get<std::string>());
  buffer_.clear();
}

rl::TrainResult dqn_train(const std::function<std::unique_ptr<env::Environment>()>& make_env,
                          const DqnConfig& config, const rl::LoopConfig& loop,
                          const rl::LoopHooks& hooks) {
  auto train_env = make_env();
  auto eval_env = make_env();
  DqnAgent agent(train_env->observation_size(), train_env->action_count(), config, loop.episodes,
                 loop.seed);
  return rl::run_loop(agent, *train_env, *eval_env, loop, hooks);
}

}  // namespace sortline::dqn
