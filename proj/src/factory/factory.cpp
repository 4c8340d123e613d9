#include "sortline/factory/factory.hpp"

#include <string>

#include "sortline/petri/validate.hpp"

namespace sortline::factory {

using petri::Emit;
using petri::Guard;
using petri::KindSet;
using petri::NetBuilder;
using petri::PlaceClass;
using petri::Token;
using petri::TokenKind;

namespace {

constexpr std::array<std::string_view, kMoveCount> kMoveNames = {
    "load_parts",         "entry_to_belt",       "belt_to_rotary",    "rotary_accept",
    "rotary_to_assembly_belt", "install_rivets", "assembly_to_rotary", "rotary_to_exit_belt",
    "exit_belt_to_exit",  "rotary_to_storage",   "exit_to_done",
};

constexpr std::array<std::string_view, kVisiblePlaceCount> kSpotNames = {
    "rotary_free",   "assembly_free", "entry_carriages", "entry_lower_parts", "entry_upper_parts",
    "main_storage",  "rotary_table",  "assembly_belt",   "assembly_slot",     "exit_belt",
    "exit_point",    "entry_point",   "entry_belt",
};

void check_config(const FactoryConfig& config) {
  for (int i = 0; i < kMoveCount; ++i) {
    const int d = config.durations[static_cast<size_t>(i)];
    if (d < 0 || d > petri::kMaxCountdown)
      throw ConfigError("duration of " + std::string(kMoveNames[static_cast<size_t>(i)]) + " is " +
                        std::to_string(d) + ", must lie in [0, 4]");
  }
  if (config.max_products < 1) throw ConfigError("max_products must be at least 1");
}

PetriNet build_net(const FactoryConfig& config) {
  NetBuilder b;
  const KindSet goods{TokenKind::carriage, TokenKind::product};

  // Declaration order matters: it is the observation layout.
  const int rotary_free = b.add_place("rotary_free", PlaceClass::resource, 1, {TokenKind::resource_unit});
  const int assembly_free = b.add_place("assembly_free", PlaceClass::resource, 1, {TokenKind::resource_unit});
  const int carriages = b.add_place("entry_carriages", PlaceClass::storage, std::nullopt, {TokenKind::carriage});
  const int lower = b.add_place("entry_lower_parts", PlaceClass::storage, std::nullopt, {TokenKind::raw_part});
  const int upper = b.add_place("entry_upper_parts", PlaceClass::storage, std::nullopt, {TokenKind::raw_part});
  const int storage = b.add_place("main_storage", PlaceClass::storage, std::nullopt, {TokenKind::product});
  const int rotary = b.add_place("rotary_table", PlaceClass::regular, 1, goods);
  const int asm_belt = b.add_place("assembly_belt", PlaceClass::regular, 1, goods);
  const int asm_slot = b.add_place("assembly_slot", PlaceClass::regular, 1, goods);
  const int exit_belt = b.add_place("exit_belt", PlaceClass::regular, 1, goods);
  const int exit_point = b.add_place("exit_point", PlaceClass::regular, 1, goods);
  const int entry_point = b.add_place("entry_point", PlaceClass::regular_short, 1, goods);
  const int entry_belt = b.add_place("entry_belt", PlaceClass::regular_short, 1, goods);

  auto move = [&](Move m) {
    const auto i = static_cast<size_t>(m);
    return b.add_transition(std::string(kMoveNames[i]), config.durations[i]);
  };

  int t = move(Move::load_parts);
  b.input(carriages, t);
  b.input(lower, t);
  b.input(upper, t);
  b.output(entry_point, t, 1, Emit::assemble, upper);

  t = move(Move::entry_to_belt);
  b.input(entry_point, t);
  b.output(entry_belt, t, 1, Emit::forward, entry_point);

  t = move(Move::belt_to_rotary);
  b.input(entry_belt, t);
  b.input(rotary_free, t);
  b.output(rotary, t, 1, Emit::forward, entry_belt);

  t = move(Move::rotary_accept);
  b.input(asm_belt, t);
  b.input(rotary_free, t);
  b.output(rotary, t, 1, Emit::forward, asm_belt);
  b.output(assembly_free, t);

  t = move(Move::rotary_to_assembly_belt);
  b.input(rotary, t);
  b.input(assembly_free, t);
  b.output(asm_belt, t, 1, Emit::forward, rotary);
  b.output(rotary_free, t);

  t = move(Move::install_rivets);
  b.input(asm_belt, t, 1, Guard::raw_product);
  b.output(asm_slot, t, 1, Emit::rivet, asm_belt);

  t = move(Move::assembly_to_rotary);
  b.input(asm_slot, t);
  b.output(asm_belt, t, 1, Emit::forward, asm_slot);

  t = move(Move::rotary_to_exit_belt);
  b.input(rotary, t);
  b.output(exit_belt, t, 1, Emit::forward, rotary);
  b.output(rotary_free, t);

  t = move(Move::exit_belt_to_exit);
  b.input(exit_belt, t);
  b.output(exit_point, t, 1, Emit::forward, exit_belt);

  t = move(Move::rotary_to_storage);
  b.input(rotary, t);
  b.output(storage, t, 1, Emit::forward, rotary);
  b.output(rotary_free, t);

  t = move(Move::exit_to_done);
  b.input(exit_point, t);

  b.add_hidden_places("busy_");

  b.mark(rotary_free, Token::resource());
  b.mark(assembly_free, Token::resource());
  // Declared initial marking: a full batch of alternating colors.
  for (int i = 0; i < config.max_products; ++i) {
    const Color c = i % 2 == 0 ? Color::blue : Color::green;
    b.mark(carriages, Token::carriage());
    b.mark(lower, Token::raw_part(c));
    b.mark(upper, Token::raw_part(c));
  }
  return b.build();
}

}  // namespace

std::string_view to_string(Move m) { return kMoveNames.at(static_cast<size_t>(m)); }
std::string_view to_string(Spot s) { return kSpotNames.at(static_cast<size_t>(s)); }

std::string_view to_string(EventKind e) {
  switch (e) {
    case EventKind::none: return "none";
    case EventKind::transition_fired: return "transition_fired";
    case EventKind::non_action: return "non_action";
    case EventKind::invalid: return "invalid";
    case EventKind::collision: return "collision";
    case EventKind::missort: return "missort";
    case EventKind::correct_delivery: return "correct_delivery";
    case EventKind::goal_reached: return "goal_reached";
  }
  return "?";
}

FactoryTopology::FactoryTopology(const FactoryConfig& config) : config_(config) {
  check_config(config_);
  net_ = build_net(config_);
}

Census FactoryTopology::census() const {
  Census c;
  for (const auto& p : net_.places()) {
    switch (p.cls) {
      case PlaceClass::resource: ++c.resource; break;
      case PlaceClass::storage: ++c.storage; break;
      case PlaceClass::regular: ++c.regular; break;
      case PlaceClass::regular_short: ++c.regular_short; break;
      case PlaceClass::hidden: ++c.hidden; break;
    }
  }
  return c;
}

FactoryTopology build_factory(const FactoryConfig& config) {
  FactoryTopology topo(config);
  const Census c = topo.census();
  if (c.resource != 2 || c.storage != 4 || c.regular != 5 || c.regular_short != 2 || c.hidden != 11)
    throw ConfigError("factory census deviates from 2/4/5/2/11");
  if (topo.net().transition_count() != kMoveCount)
    throw ConfigError("factory must expose exactly 11 controllable transitions");
  const int width = 2 * c.resource + c.storage + 6 * c.regular + 4 * c.regular_short + 5 * c.hidden;
  if (width != kObservationSize) throw ConfigError("encoded observation width is not 101");
  auto diags = petri::validate_net(topo.net());
  if (!diags.empty()) throw ConfigError("factory net failed validation: " + diags.front().message);
  return topo;
}

Marking inject_products(const FactoryTopology& topology, const ProductSpec& spec) {
  const int n = static_cast<int>(spec.colors.size());
  if (n < 1 || n > topology.config().max_products)
    throw ConfigError("product count " + std::to_string(n) + " outside [1, " +
                      std::to_string(topology.config().max_products) + "]");
  const auto& net = topology.net();
  Marking m(net.place_count(), net.transition_count());
  auto slot = [&](Spot s) -> auto& { return m.tokens[static_cast<size_t>(topology.place(s))]; };
  slot(Spot::rotary_free).push_back(Token::resource());
  slot(Spot::assembly_free).push_back(Token::resource());
  for (Color c : spec.colors) {
    slot(Spot::entry_carriages).push_back(Token::carriage());
    slot(Spot::entry_lower_parts).push_back(Token::raw_part(c));
    slot(Spot::entry_upper_parts).push_back(Token::raw_part(c));
  }
  return m;
}

Delivered judge_delivery(const FactoryTopology& topology, int place, const Token& token) {
  const bool to_storage = place == topology.place(Spot::main_storage);
  const bool to_exit = place == topology.place(Spot::exit_point);
  if (!to_storage && !to_exit) return Delivered::not_terminal;
  if (token.kind != TokenKind::product || !token.riveted) return Delivered::missorted;
  const Color wanted = to_storage ? Color::green : Color::blue;
  return token.color == wanted ? Delivered::correct : Delivered::missorted;
}

Classification classify_step(const FactoryTopology& topology, const DeliveryTally& before,
                             const StepOutcome& outcome) {
  Classification out;
  out.tally = before;
  if (outcome.collision) {
    out.kind = EventKind::collision;
    return out;
  }
  int correct = 0;
  int missorted = 0;
  for (const auto& c : outcome.completions) {
    for (const auto& d : c.delivered) {
      switch (judge_delivery(topology, d.place, d.token)) {
        case Delivered::correct: ++correct; break;
        case Delivered::missorted: ++missorted; break;
        case Delivered::not_terminal: break;
      }
    }
  }
  out.tally.correct += correct;
  out.tally.missorted += missorted;
  if (missorted > 0)
    out.kind = EventKind::missort;
  else if (correct > 0 && out.tally.correct == out.tally.n_products)
    out.kind = EventKind::goal_reached;
  else if (correct > 0)
    out.kind = EventKind::correct_delivery;
  else if (outcome.action != kNonAction && !outcome.fired)
    out.kind = EventKind::invalid;
  else if (outcome.action == kNonAction)
    out.kind = EventKind::non_action;
  else
    out.kind = EventKind::transition_fired;
  return out;
}

int products_in_system(const FactoryTopology& topology, const Marking& m) {
  int n = m.count(topology.place(Spot::entry_upper_parts));
  for (Spot s : {Spot::rotary_table, Spot::assembly_belt, Spot::assembly_slot, Spot::exit_belt,
                 Spot::entry_point, Spot::entry_belt}) {
    for (const auto& tok : m.tokens[static_cast<size_t>(topology.place(s))])
      n += tok.kind == TokenKind::product ? 1 : 0;
  }
  for (const auto& held : m.pending)
    for (const auto& d : held) n += d.token.kind == TokenKind::product ? 1 : 0;
  return n;
}

}  // namespace sortline::factory
