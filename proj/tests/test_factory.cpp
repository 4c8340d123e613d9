#include <doctest.h>

#include "sortline/errors.hpp"
#include "sortline/factory/factory.hpp"
#include "sortline/petri/validate.hpp"

using namespace sortline;
using namespace sortline::factory;
using petri::Token;

namespace {

const FactoryTopology& topo() {
  static const FactoryTopology t = build_factory();
  return t;
}

petri::Completion delivery(Spot s, Token tok, Move by = Move::rotary_to_storage) {
  return {topo().transition(by), {{topo().place(s), tok}}};
}

StepOutcome fired(std::vector<petri::Completion> completions = {}) {
  StepOutcome o;
  o.action = 0;
  o.fired = true;
  o.completions = std::move(completions);
  return o;
}

}  // namespace

TEST_CASE("default topology census") {
  const auto& net = topo().net();
  CHECK(net.place_count() == 24);
  CHECK(net.transition_count() == kMoveCount);
  const auto c = topo().census();
  CHECK(c.resource == 2);
  CHECK(c.storage == 4);
  CHECK(c.regular == 5);
  CHECK(c.regular_short == 2);
  CHECK(c.hidden == 11);
  CHECK(kActionCount == 12);
  CHECK(2 * 2 + 4 * 1 + 5 * 6 + 2 * 4 + 11 * 5 == kObservationSize);
  CHECK(petri::validate_net(net).empty());
}

TEST_CASE("default durations") {
  const auto d = FactoryConfig::default_durations();
  CHECK(d[static_cast<size_t>(Move::install_rivets)] == 4);
  CHECK(d[static_cast<size_t>(Move::entry_to_belt)] == 2);
  CHECK(d[static_cast<size_t>(Move::load_parts)] == 2);
  CHECK(d[static_cast<size_t>(Move::rotary_accept)] == 1);
  for (int t = 0; t < kMoveCount; ++t) CHECK(topo().net().transition(t).duration == d[static_cast<size_t>(t)]);
}

TEST_CASE("durations outside [0, 4] are rejected") {
  FactoryConfig c;
  c.durations[0] = 5;
  CHECK_THROWS_AS(build_factory(c), ConfigError);
  c.durations[0] = -1;
  CHECK_THROWS_AS(build_factory(c), ConfigError);
  FactoryConfig z;
  z.max_products = 0;
  CHECK_THROWS_AS(build_factory(z), ConfigError);
}

TEST_CASE("product injection") {
  auto counters = [](const petri::Marking& m) {
    return std::array{m.count(topo().place(Spot::entry_carriages)), m.count(topo().place(Spot::entry_lower_parts)),
                      m.count(topo().place(Spot::entry_upper_parts))};
  };
  const auto one = inject_products(topo(), {{Color::blue}});
  CHECK(counters(one) == std::array{1, 1, 1});
  for (Spot s : {Spot::rotary_table, Spot::assembly_belt, Spot::assembly_slot, Spot::exit_belt, Spot::exit_point,
                 Spot::entry_point, Spot::entry_belt, Spot::main_storage})
    CHECK(one.count(topo().place(s)) == 0);
  CHECK(one.count(topo().place(Spot::rotary_free)) == 1);
  CHECK(one.count(topo().place(Spot::assembly_free)) == 1);

  const auto three = inject_products(topo(), {{Color::blue, Color::green, Color::green}});
  CHECK(counters(three) == std::array{3, 3, 3});
  CHECK_THROWS_AS(inject_products(topo(), {{}}), ConfigError);
  CHECK_THROWS_AS(inject_products(topo(), {{Color::blue, Color::blue, Color::blue, Color::blue}}), ConfigError);
  CHECK(products_in_system(topo(), three) == 3);
}

TEST_CASE("delivery judgement") {
  const int storage = topo().place(Spot::main_storage);
  const int exit = topo().place(Spot::exit_point);
  CHECK(judge_delivery(topo(), storage, Token::product(Color::green, true)) == Delivered::correct);
  CHECK(judge_delivery(topo(), exit, Token::product(Color::blue, true)) == Delivered::correct);
  CHECK(judge_delivery(topo(), storage, Token::product(Color::blue, true)) == Delivered::missorted);
  CHECK(judge_delivery(topo(), exit, Token::product(Color::green, true)) == Delivered::missorted);
  CHECK(judge_delivery(topo(), storage, Token::product(Color::green, false)) == Delivered::missorted);
  CHECK(judge_delivery(topo(), exit, Token::product(Color::blue, false)) == Delivered::missorted);
  CHECK(judge_delivery(topo(), topo().place(Spot::rotary_table), Token::product(Color::blue, true)) ==
        Delivered::not_terminal);
}

TEST_CASE("step classification examples") {
  const DeliveryTally pending{3, 0, 0};
  SUBCASE("green finished product into storage with others pending") {
    const auto c = classify_step(topo(), pending, fired({delivery(Spot::main_storage, Token::product(Color::green, true))}));
    CHECK(c.kind == EventKind::correct_delivery);
    CHECK(c.tally.correct == 1);
  }
  SUBCASE("blue finished product into storage") {
    const auto c = classify_step(topo(), pending, fired({delivery(Spot::main_storage, Token::product(Color::blue, true))}));
    CHECK(c.kind == EventKind::missort);
    CHECK(c.tally.missorted == 1);
  }
  SUBCASE("last of three correctly delivered") {
    const auto c = classify_step(topo(), {3, 2, 0},
                                 fired({delivery(Spot::exit_point, Token::product(Color::blue, true), Move::exit_belt_to_exit)}));
    CHECK(c.kind == EventKind::goal_reached);
  }
  SUBCASE("plain moves") {
    CHECK(classify_step(topo(), pending, fired()).kind == EventKind::transition_fired);
    StepOutcome idle;
    CHECK(classify_step(topo(), pending, idle).kind == EventKind::non_action);
    StepOutcome bad;
    bad.action = 3;
    CHECK(classify_step(topo(), pending, bad).kind == EventKind::invalid);
  }
}

TEST_CASE("classification precedence is a total order") {
  // Each feature can be switched on independently; the reported event must
  // be the highest-ranked feature present.
  enum Feature { collision, missort, goal, correct, invalid, n_features };
  const EventKind rank[] = {EventKind::collision, EventKind::missort, EventKind::goal_reached,
                            EventKind::correct_delivery, EventKind::invalid};
  for (int mask = 0; mask < (1 << n_features); ++mask) {
    auto on = [&](int f) { return (mask & (1 << f)) != 0; };
    if (on(goal) && on(correct)) continue;  // one correct delivery cannot both finish and not finish
    StepOutcome o;
    o.action = on(invalid) ? 4 : kNonAction;
    o.fired = false;
    if (on(collision)) o.collision = petri::CollisionDetected(0, 0);
    if (on(missort)) o.completions.push_back(delivery(Spot::main_storage, Token::product(Color::blue, true)));
    if (on(goal) || on(correct))
      o.completions.push_back(delivery(Spot::exit_point, Token::product(Color::blue, true), Move::exit_belt_to_exit));
    const DeliveryTally before{3, on(goal) ? 2 : 0, 0};
    EventKind expect = o.action == kNonAction ? EventKind::non_action : EventKind::transition_fired;
    for (int f = n_features - 1; f >= 0; --f)
      if (on(f)) expect = rank[f];
    CAPTURE(mask);
    CHECK(classify_step(topo(), before, o).kind == expect);
  }
}
