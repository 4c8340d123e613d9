#include "sortline/env/chain_env.hpp"

#include <stdexcept>

#include "sortline/errors.hpp"
#include "sortline/random.hpp"

namespace sortline::env {

ChainEnv::ChainEnv(ChainConfig config) : config_(config) {
  if (config_.states < 2) throw ConfigError("a chain needs at least two states");
  if (config_.max_steps < 1) throw ConfigError("max_steps must be positive");
}

Observation ChainEnv::reset(std::uint64_t seed) {
  Rng gen(seed);
  return reset_to(uniform_index(gen, config_.states));
}

Observation ChainEnv::reset_to(int state) {
  if (state < 0 || state >= config_.states) throw std::out_of_range("chain state out of range");
  state_ = state;
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult ChainEnv::step(int action) {
  if (done_) throw EpisodeOver();
  if (action != 0 && action != 1) throw std::out_of_range("chain actions are 0 and 1");
  ++steps_;
  StepResult r;
  if (action == 0 && state_ == 0) {
    r.reward = config_.left_reward;
    r.terminated = true;
  } else if (action == 1 && state_ == config_.states - 1) {
    r.reward = config_.right_reward;
    r.terminated = true;
    r.info.event = EventKind::goal_reached;
  } else {
    state_ += action == 1 ? 1 : -1;
    r.info.event = EventKind::transition_fired;
  }
  r.truncated = !r.terminated && steps_ >= config_.max_steps;
  r.info.tick = steps_;
  r.observation = observe();
  done_ = r.terminated || r.truncated;
  return r;
}

Observation ChainEnv::observe() const {
  Observation o(static_cast<size_t>(config_.states), 0.0);
  o[static_cast<size_t>(state_)] = 1.0;
  return o;
}

}  // namespace sortline::env
