#pragma once

#include <vector>

#include "sortline/env/encoding.hpp"
#include "sortline/env/environment.hpp"
#include "sortline/factory/factory.hpp"

namespace sortline::testing {

/// Hand-written controller for the sorting line that reads only the
/// observation vector. It works downstream-first and never starts a move
/// whose destination is occupied or already receiving goods.
class ScriptedPolicy {
 public:
  explicit ScriptedPolicy(const factory::FactoryTopology& topo) {
    const auto blocks = env::observation_blocks(topo);
    for (int p = 0; p < factory::kVisiblePlaceCount; ++p) offset_.push_back(blocks[static_cast<size_t>(p)].offset);
    for (int t = 0; t < factory::kMoveCount; ++t)
      hidden_offset_.push_back(blocks[static_cast<size_t>(topo.hidden_place(static_cast<factory::Move>(t)))].offset);
  }

  int operator()(const env::Observation& obs) const {
    using factory::Move;
    using factory::Spot;
    auto slot = [&](Spot s) {
      const int width = s == Spot::entry_point || s == Spot::entry_belt ? 4 : 6;
      for (int i = 0; i < width; ++i)
        if (obs[static_cast<size_t>(offset_[static_cast<size_t>(s)] + i)] > 0.5) return i;
      return -1;
    };
    auto busy = [&](Move m) { return obs[static_cast<size_t>(hidden_offset_[static_cast<size_t>(m)])] < 0.5; };
    auto free_res = [&](Spot s) { return obs[static_cast<size_t>(offset_[static_cast<size_t>(s)])] > 0.5; };
    auto count = [&](Spot s) { return obs[static_cast<size_t>(offset_[static_cast<size_t>(s)])]; };
    auto empty = [&](Spot s) { return slot(s) == 0; };
    auto act = [](Move m) { return static_cast<int>(m); };
    constexpr int blue_done = 4, green_done = 5;

    // Which moves deliver into each spot, to avoid double booking.
    const bool exit_incoming = busy(Move::exit_belt_to_exit);
    const bool exit_belt_incoming = busy(Move::rotary_to_exit_belt);
    const bool entry_belt_incoming = busy(Move::entry_to_belt);
    const bool entry_incoming = busy(Move::load_parts);

    if (!empty(Spot::exit_point) && !busy(Move::exit_to_done)) return act(Move::exit_to_done);
    if (!empty(Spot::exit_belt) && !busy(Move::exit_belt_to_exit) && empty(Spot::exit_point) &&
        !exit_incoming)
      return act(Move::exit_belt_to_exit);
    const int on_table = slot(Spot::rotary_table);
    if (on_table == green_done) return act(Move::rotary_to_storage);
    if (on_table == blue_done && empty(Spot::exit_belt) && !exit_belt_incoming)
      return act(Move::rotary_to_exit_belt);
    if (on_table >= 2 && on_table <= 3 && free_res(Spot::assembly_free))
      return act(Move::rotary_to_assembly_belt);
    const int on_belt = slot(Spot::assembly_belt);
    if ((on_belt == 2 || on_belt == 3) && !busy(Move::install_rivets)) return act(Move::install_rivets);
    if (slot(Spot::assembly_slot) >= blue_done && !busy(Move::assembly_to_rotary) &&
        empty(Spot::assembly_belt))
      return act(Move::assembly_to_rotary);
    if (on_belt >= blue_done && free_res(Spot::rotary_free) && !busy(Move::rotary_accept))
      return act(Move::rotary_accept);
    if (!empty(Spot::entry_belt) && free_res(Spot::rotary_free) && free_res(Spot::assembly_free) &&
        !busy(Move::belt_to_rotary))
      return act(Move::belt_to_rotary);
    if (!empty(Spot::entry_point) && empty(Spot::entry_belt) && !entry_belt_incoming &&
        !busy(Move::entry_to_belt))
      return act(Move::entry_to_belt);
    if (count(Spot::entry_carriages) > 0 && empty(Spot::entry_point) && !entry_incoming)
      return act(Move::load_parts);
    return factory::kNonAction;
  }

 private:
  std::vector<int> offset_;
  std::vector<int> hidden_offset_;
};

}  // namespace sortline::testing
