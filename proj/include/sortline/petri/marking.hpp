#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sortline/petri/token.hpp"

namespace sortline::petri {

struct Delivery {
  int place = 0;
  Token token;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

/// Mutable simulation state. Tokens in each place are kept in arrival
/// order; consumption takes the oldest admissible token. Outputs of a
/// transition in progress are held in `pending` until its countdown ends.
struct Marking {
  std::vector<std::vector<Token>> tokens;    // per place
  std::vector<std::vector<Delivery>> pending;  // per transition
  std::int64_t tick = 0;

  Marking() = default;
  Marking(int places, int transitions)
      : tokens(static_cast<size_t>(places)), pending(static_cast<size_t>(transitions)) {}

  [[nodiscard]] int count(int place) const {
    return static_cast<int>(tokens[static_cast<size_t>(place)].size());
  }
  [[nodiscard]] std::vector<int> counts() const;

  /// Canonical state key, ignoring the tick counter.
  [[nodiscard]] std::string key() const;

  friend bool operator==(const Marking&, const Marking&) = default;
};

}  // namespace sortline::petri
