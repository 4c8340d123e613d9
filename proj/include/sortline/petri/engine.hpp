#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sortline/petri/marking.hpp"
#include "sortline/petri/net.hpp"

namespace sortline::petri {

class NotEnabled : public std::runtime_error {
 public:
  explicit NotEnabled(int transition);
  int transition;
};

/// Raised when delivering an output would overflow a bounded place.
class CollisionDetected : public std::runtime_error {
 public:
  CollisionDetected(int place, int transition);
  int place;
  int transition;
};

struct Completion {
  int transition = 0;
  std::vector<Delivery> delivered;
};

struct TickResult {
  Marking marking;
  std::vector<Completion> completed;
};

[[nodiscard]] bool is_busy(const PetriNet& net, const Marking& m, int t);
[[nodiscard]] bool is_enabled(const PetriNet& net, const Marking& m, int t);

/// Ascending transition indices enabled in `m`. Output capacity is not
/// considered here; overflow surfaces as a collision on delivery.
[[nodiscard]] std::vector<int> enabled_transitions(const PetriNet& net, const Marking& m);

/// Consumes the inputs of `t` and starts its countdown. Zero-duration
/// transitions deliver immediately (and may throw CollisionDetected).
[[nodiscard]] Marking fire(const PetriNet& net, Marking m, int t);

/// Advances time by one unit: every countdown decrements, expired ones
/// release their pending outputs in transition order.
[[nodiscard]] TickResult tick(const PetriNet& net, Marking m);

}  // namespace sortline::petri
