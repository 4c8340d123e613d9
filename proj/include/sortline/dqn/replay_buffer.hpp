#pragma once

#include <cstddef>
#include <vector>

#include "sortline/env/environment.hpp"
#include "sortline/random.hpp"

namespace sortline::dqn {

struct Experience {
  env::Observation s;
  int a = 0;
  double r = 0.0;
  env::Observation s_next;
  bool done = false;  // terminal, not merely truncated
};

/// Fixed-capacity FIFO of experiences with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  /// Overwrites the oldest item once full.
  void push(Experience e);

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] bool empty() const { return items_.empty(); }

  /// i-th oldest stored experience.
  [[nodiscard]] const Experience& at(std::size_t i) const;

  /// `n` items drawn uniformly with replacement.
  [[nodiscard]] std::vector<const Experience*> sample(std::size_t n, Rng& gen) const;

  void clear();

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest item once full
  std::vector<Experience> items_;
};

}  // namespace sortline::dqn
