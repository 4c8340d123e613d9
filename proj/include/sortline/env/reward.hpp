#pragma once

#include <string_view>

#include "sortline/factory/factory.hpp"

namespace sortline::env {

enum class RewardVariant { r1, r2 };

struct RewardTable {
  double collision;
  double missort;
  double invalid;
  double step;
  double goal;
};

inline constexpr RewardTable kRewardR1{-1.0, -0.5, -0.01, 0.0, 1.0};
inline constexpr RewardTable kRewardR2{-1.0, -0.5, -0.01, -0.001, 1.0};

constexpr const RewardTable& reward_table(RewardVariant v) {
  return v == RewardVariant::r1 ? kRewardR1 : kRewardR2;
}

/// Fired transitions, non-actions and intermediate correct deliveries all
/// earn the step value.
double reward(factory::EventKind event, RewardVariant variant);

std::string_view to_string(RewardVariant v);
RewardVariant parse_reward_variant(std::string_view s);

}  // namespace sortline::env
