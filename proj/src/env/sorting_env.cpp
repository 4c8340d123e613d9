#include "sortline/env/sorting_env.hpp"

#include <stdexcept>
#include <string>

#include "sortline/env/encoding.hpp"

namespace sortline::env {

using factory::Color;

std::vector<Color> draw_colors(std::uint64_t seed, int n) {
  std::mt19937_64 gen(seed);
  std::vector<Color> colors;
  colors.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) colors.push_back((gen() >> 63) != 0 ? Color::green : Color::blue);
  return colors;
}

SortingEnv::SortingEnv(EnvConfig config)
    : config_(config), topology_(factory::FactoryTopology(config.factory)) {
  if (config_.n_products < 1 || config_.n_products > config_.factory.max_products)
    throw ConfigError("n_products " + std::to_string(config_.n_products) + " outside [1, " +
                      std::to_string(config_.factory.max_products) + "]");
  if (config_.max_steps < 1) throw ConfigError("max_steps must be positive");
}

Observation SortingEnv::reset(std::uint64_t seed) {
  return reset(seed, draw_colors(seed, config_.n_products));
}

Observation SortingEnv::reset(std::uint64_t /*seed*/, const std::vector<Color>& colors) {
  marking_ = factory::inject_products(topology_, {colors});
  colors_ = colors;
  tally_ = {static_cast<int>(colors.size()), 0, 0};
  steps_ = 0;
  done_ = false;
  return encode_state(topology_, marking_);
}

StepResult SortingEnv::step(int action) {
  if (done_) throw EpisodeOver();
  if (action < 0 || action >= factory::kActionCount)
    throw std::out_of_range("action " + std::to_string(action) + " outside [0, 11]");

  const auto& net = topology_.net();
  factory::StepOutcome outcome;
  outcome.action = action;
  petri::Marking m = marking_;
  try {
    if (action != factory::kNonAction && petri::is_enabled(net, m, action)) {
      m = petri::fire(net, std::move(m), action);
      outcome.fired = true;
    }
    auto ticked = petri::tick(net, m);
    m = std::move(ticked.marking);
    outcome.completions = std::move(ticked.completed);
  } catch (const petri::CollisionDetected& c) {
    outcome.collision = c;
  }
  marking_ = std::move(m);
  ++steps_;

  const auto cls = factory::classify_step(topology_, tally_, outcome);
  tally_ = cls.tally;

  StepResult r;
  r.observation = encode_state(topology_, marking_);
  r.reward = reward(cls.kind, config_.reward);
  r.terminated = cls.kind == EventKind::collision || cls.kind == EventKind::goal_reached;
  r.truncated = !r.terminated && steps_ >= config_.max_steps;
  r.info = {cls.kind, tally_.correct, tally_.missorted, tally_.n_products, marking_.tick};
  done_ = r.terminated || r.truncated;
  return r;
}

}  // namespace sortline::env
