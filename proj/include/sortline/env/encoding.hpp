#pragma once

#include <stdexcept>

#include "sortline/env/environment.hpp"
#include "sortline/factory/factory.hpp"

namespace sortline::env {

class EncodingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr int kResourceWidth = 2;
inline constexpr int kRegularWidth = 6;
inline constexpr int kRegularShortWidth = 4;
inline constexpr int kHiddenWidth = 5;

/// One-hot slot of a token on a regular place:
/// empty, carriage, blue-raw, green-raw, blue-finished, green-finished.
int regular_slot(const std::vector<petri::Token>& tokens);

/// Observation layout: resource, storage, regular, regular-short and hidden
/// blocks, each in topology declaration order.
///   resource       [available, unavailable]
///   storage        token count
///   regular        6-way one-hot (see regular_slot)
///   regular-short  first 4 slots of the regular one-hot
///   hidden         [idle, 1, 2, 3, 4] remaining ticks
Observation encode_state(const factory::FactoryTopology& topology, const petri::Marking& m);

struct Block {
  petri::PlaceClass cls;
  int offset;
  int width;
};

/// Blocks of the encoding in order, one per place.
std::vector<Block> observation_blocks(const factory::FactoryTopology& topology);

}  // namespace sortline::env
