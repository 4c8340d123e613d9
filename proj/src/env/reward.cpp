#include "sortline/env/reward.hpp"

#include <string>

#include "sortline/errors.hpp"

namespace sortline::env {

double reward(factory::EventKind event, RewardVariant variant) {
  const RewardTable& table = reward_table(variant);
  switch (event) {
    case factory::EventKind::collision: return table.collision;
    case factory::EventKind::missort: return table.missort;
    case factory::EventKind::invalid: return table.invalid;
    case factory::EventKind::goal_reached: return table.goal;
    case factory::EventKind::none:
    case factory::EventKind::transition_fired:
    case factory::EventKind::non_action:
    case factory::EventKind::correct_delivery: return table.step;
  }
  return table.step;
}

std::string_view to_string(RewardVariant v) { return v == RewardVariant::r1 ? "r1" : "r2"; }

RewardVariant parse_reward_variant(std::string_view s) {
  if (s == "r1" || s == "R1") return RewardVariant::r1;
  if (s == "r2" || s == "R2") return RewardVariant::r2;
  throw ConfigError("unknown reward variant '" + std::string(s) + "' (expected r1 or r2)");
}

}  // namespace sortline::env
