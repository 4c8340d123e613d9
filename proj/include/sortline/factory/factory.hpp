#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "sortline/errors.hpp"
#include "sortline/petri/engine.hpp"
#include "sortline/petri/net.hpp"

namespace sortline::factory {

using petri::Color;
using petri::Marking;
using petri::PetriNet;

/// Controllable transitions, in action-index order. The non-action is the
/// extra index kNonAction.
enum class Move : int {
  load_parts,
  entry_to_belt,
  belt_to_rotary,
  rotary_accept,
  rotary_to_assembly_belt,
  install_rivets,
  assembly_to_rotary,
  rotary_to_exit_belt,
  exit_belt_to_exit,
  rotary_to_storage,
  exit_to_done,
};

inline constexpr int kMoveCount = 11;
inline constexpr int kNonAction = kMoveCount;
inline constexpr int kActionCount = kMoveCount + 1;
inline constexpr int kObservationSize = 101;

/// Visible places, in declaration (and encoding) order.
enum class Spot : int {
  rotary_free,
  assembly_free,
  entry_carriages,
  entry_lower_parts,
  entry_upper_parts,
  main_storage,
  rotary_table,
  assembly_belt,
  assembly_slot,
  exit_belt,
  exit_point,
  entry_point,
  entry_belt,
};

inline constexpr int kVisiblePlaceCount = 13;

std::string_view to_string(Move m);
std::string_view to_string(Spot s);

struct FactoryConfig {
  /// Ticks per move, indexed by Move. Each must lie in [0, 4].
  std::array<int, kMoveCount> durations = default_durations();
  int max_products = 3;

  static constexpr std::array<int, kMoveCount> default_durations() {
    // load, entry belt, belt->rotary, accept, rotary->asm belt, rivets,
    // asm->rotary belt, rotary->exit belt, exit belt, storage, exit done
    return {2, 2, 1, 1, 1, 4, 2, 1, 2, 1, 1};
  }
};

struct ProductSpec {
  std::vector<Color> colors;
};

struct Census {
  int resource = 0;
  int storage = 0;
  int regular = 0;
  int regular_short = 0;
  int hidden = 0;
};

class FactoryTopology {
 public:
  explicit FactoryTopology(const FactoryConfig& config = {});

  [[nodiscard]] const PetriNet& net() const { return net_; }
  [[nodiscard]] const FactoryConfig& config() const { return config_; }
  [[nodiscard]] int place(Spot s) const { return static_cast<int>(s); }
  [[nodiscard]] int transition(Move m) const { return static_cast<int>(m); }
  [[nodiscard]] int hidden_place(Move m) const { return net_.transition(transition(m)).hidden_place; }
  [[nodiscard]] Census census() const;
  [[nodiscard]] const Marking& initial_marking() const { return net_.initial_marking(); }

 private:
  FactoryConfig config_;
  PetriNet net_;
};

/// Builds and checks the canonical sorting line. Throws ConfigError on bad
/// durations or counts.
FactoryTopology build_factory(const FactoryConfig& config = {});

/// Rest-state marking holding the given products in the entry storages.
Marking inject_products(const FactoryTopology& topology, const ProductSpec& spec);

enum class EventKind {
  none,
  transition_fired,
  non_action,
  invalid,
  collision,
  missort,
  correct_delivery,
  goal_reached,
};

std::string_view to_string(EventKind e);

/// Running delivery totals for an episode.
struct DeliveryTally {
  int n_products = 0;
  int correct = 0;
  int missorted = 0;
};

/// What happened during one environment step, as seen by the engine.
struct StepOutcome {
  int action = kNonAction;
  bool fired = false;  // the chosen transition was enabled and fired
  std::optional<petri::CollisionDetected> collision;
  std::vector<petri::Completion> completions;
};

struct Classification {
  EventKind kind = EventKind::none;
  DeliveryTally tally;  // totals after the step
};

/// Whether delivering `token` into `place` is a correct sort, a missort, or
/// not a terminal delivery at all.
enum class Delivered { not_terminal, correct, missorted };
Delivered judge_delivery(const FactoryTopology& topology, int place, const petri::Token& token);

/// Single event per step, precedence
/// collision > missort > goal > correct delivery > invalid > fired/non-action.
Classification classify_step(const FactoryTopology& topology, const DeliveryTally& before,
                             const StepOutcome& outcome);

/// Products still inside the line: unloaded parts, tokens on non-terminal
/// places and goods in transit (including those heading for a terminal).
int products_in_system(const FactoryTopology& topology, const Marking& m);

}  // namespace sortline::factory
