#pragma once

#include <optional>
#include <random>

#include "sortline/env/environment.hpp"
#include "sortline/env/reward.hpp"
#include "sortline/factory/factory.hpp"

namespace sortline::env {

inline constexpr int kDefaultMaxSteps = 100;
inline constexpr int kDefaultProducts = 3;

struct EnvConfig {
  factory::FactoryConfig factory;
  RewardVariant reward = RewardVariant::r1;
  int n_products = kDefaultProducts;
  int max_steps = kDefaultMaxSteps;
};

/// The sorting line as an episodic MDP: one agent step fires at most one
/// transition and then advances the net by exactly one tick.
class SortingEnv final : public Environment {
 public:
  explicit SortingEnv(EnvConfig config = {});

  [[nodiscard]] int observation_size() const override { return factory::kObservationSize; }
  [[nodiscard]] int action_count() const override { return factory::kActionCount; }

  /// Colors drawn i.i.d. uniform from a generator seeded by `seed`.
  Observation reset(std::uint64_t seed) override;
  /// Explicit color sequence; its length overrides n_products.
  Observation reset(std::uint64_t seed, const std::vector<factory::Color>& colors);
  StepResult step(int action) override;

  [[nodiscard]] const factory::FactoryTopology& topology() const { return topology_; }
  [[nodiscard]] const petri::Marking& marking() const { return marking_; }
  [[nodiscard]] const std::vector<factory::Color>& colors() const { return colors_; }
  [[nodiscard]] const factory::DeliveryTally& tally() const { return tally_; }
  [[nodiscard]] int steps() const { return steps_; }
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] const EnvConfig& config() const { return config_; }

 private:
  EnvConfig config_;
  factory::FactoryTopology topology_;
  petri::Marking marking_;
  std::vector<factory::Color> colors_;
  factory::DeliveryTally tally_;
  int steps_ = 0;
  bool done_ = true;
};

/// Draws `n` colors uniformly from a generator seeded by `seed`.
std::vector<factory::Color> draw_colors(std::uint64_t seed, int n);

}  // namespace sortline::env
