#include "sortline/env/encoding.hpp"

#include <string>

namespace sortline::env {

using petri::PlaceClass;
using petri::Token;
using petri::TokenKind;

namespace {

int width_of(PlaceClass cls) {
  switch (cls) {
    case PlaceClass::resource: return kResourceWidth;
    case PlaceClass::storage: return 1;
    case PlaceClass::regular: return kRegularWidth;
    case PlaceClass::regular_short: return kRegularShortWidth;
    case PlaceClass::hidden: return kHiddenWidth;
  }
  return 0;
}

constexpr PlaceClass kOrder[] = {PlaceClass::resource, PlaceClass::storage, PlaceClass::regular,
                                 PlaceClass::regular_short, PlaceClass::hidden};

}  // namespace

int regular_slot(const std::vector<Token>& tokens) {
  if (tokens.empty()) return 0;
  if (tokens.size() > 1) throw EncodingError("regular place holds more than one token");
  const Token& t = tokens.front();
  switch (t.kind) {
    case TokenKind::carriage: return 1;
    case TokenKind::product:
      return 2 + (t.color == petri::Color::green ? 1 : 0) + (t.riveted ? 2 : 0);
    default: throw EncodingError("token " + describe(t) + " cannot sit on a regular place");
  }
}

std::vector<Block> observation_blocks(const factory::FactoryTopology& topology) {
  const auto& net = topology.net();
  std::vector<Block> blocks;
  int offset = 0;
  for (PlaceClass cls : kOrder)
    for (const auto& p : net.places())
      if (p.cls == cls) {
        blocks.push_back({cls, offset, width_of(cls)});
        offset += width_of(cls);
      }
  return blocks;
}

Observation encode_state(const factory::FactoryTopology& topology, const petri::Marking& m) {
  const auto& net = topology.net();
  Observation obs;
  obs.reserve(factory::kObservationSize);
  for (PlaceClass cls : kOrder) {
    for (int p = 0; p < net.place_count(); ++p) {
      const auto& place = net.place(p);
      if (place.cls != cls) continue;
      const auto& tokens = m.tokens[static_cast<size_t>(p)];
      const auto base = obs.size();
      obs.resize(base + static_cast<size_t>(width_of(cls)), 0.0);
      switch (cls) {
        case PlaceClass::resource:
          obs[base + (tokens.empty() ? 1 : 0)] = 1.0;
          break;
        case PlaceClass::storage:
          obs[base] = static_cast<double>(tokens.size());
          break;
        case PlaceClass::regular:
          obs[base + static_cast<size_t>(regular_slot(tokens))] = 1.0;
          break;
        case PlaceClass::regular_short: {
          const int slot = regular_slot(tokens);
          if (slot >= kRegularShortWidth)
            throw EncodingError("finished product on short place " + place.name);
          obs[base + static_cast<size_t>(slot)] = 1.0;
          break;
        }
        case PlaceClass::hidden: {
          int slot = 0;
          if (!tokens.empty()) {
            slot = tokens.front().remaining;
            if (slot < 1 || slot > petri::kMaxCountdown)
              throw EncodingError("countdown out of range on " + place.name);
          }
          obs[base + static_cast<size_t>(slot)] = 1.0;
          break;
        }
      }
    }
  }
  return obs;
}

}  // namespace sortline::env
