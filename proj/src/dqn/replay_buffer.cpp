#include "sortline/dqn/replay_buffer.hpp"

#include <stdexcept>

#include "sortline/errors.hpp"

namespace sortline::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
    return;
  }
  items_[head_] = std::move(e);
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t n, Rng& gen) const {
  if (items_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::vector<const Experience*> out;
  out.reserve(n);
  const int size = static_cast<int>(items_.size());
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(&items_[static_cast<std::size_t>(uniform_index(gen, size))]);
  return out;
}

void ReplayBuffer::clear() {
  items_.clear();
  head_ = 0;
}

}  // namespace sortline::dqn
