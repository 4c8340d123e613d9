#pragma once

#include <cstdint>
#include <vector>

#include "sortline/factory/factory.hpp"

namespace sortline::env {

using Observation = std::vector<double>;
using factory::EventKind;

struct StepInfo {
  EventKind event = EventKind::none;
  int products_correct = 0;
  int products_missorted = 0;
  int n_products = 0;
  std::int64_t tick = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

class EpisodeOver : public std::logic_error {
 public:
  EpisodeOver() : std::logic_error("step called on a finished episode") {}
};

/// Episodic MDP with a discrete action set, as consumed by the learners.
class Environment {
 public:
  virtual ~Environment() = default;

  [[nodiscard]] virtual int observation_size() const = 0;
  [[nodiscard]] virtual int action_count() const = 0;

  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
};

}  // namespace sortline::env
