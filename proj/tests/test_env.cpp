#include <doctest.h>

#include <set>
#include <sstream>

#include "sortline/env/encoding.hpp"
#include "sortline/env/reward.hpp"
#include "sortline/env/sorting_env.hpp"
#include "sortline/env/trace.hpp"
#include "sortline/errors.hpp"
#include "sortline/random.hpp"
#include "support/scripted_policy.hpp"

using namespace sortline;
using namespace sortline::env;
using factory::Move;
using factory::Spot;
using petri::Color;
using petri::Token;

namespace {

constexpr int kNon = factory::kNonAction;

void check_blocks(const SortingEnv& env, const Observation& obs) {
  REQUIRE(obs.size() == static_cast<size_t>(factory::kObservationSize));
  for (const auto& b : observation_blocks(env.topology())) {
    if (b.cls == petri::PlaceClass::storage) {
      CHECK(obs[static_cast<size_t>(b.offset)] >= 0.0);
      continue;
    }
    double sum = 0.0;
    for (int i = 0; i < b.width; ++i) {
      const double v = obs[static_cast<size_t>(b.offset + i)];
      CHECK((v == 0.0 || v == 1.0));
      sum += v;
    }
    CHECK(sum == 1.0);
  }
}

std::vector<Color> colors_of(int bits, int n) {
  std::vector<Color> c;
  for (int i = 0; i < n; ++i) c.push_back((bits >> i) & 1 ? Color::green : Color::blue);
  return c;
}

}  // namespace

TEST_CASE("reward tables") {
  using E = EventKind;
  const std::pair<E, std::array<double, 2>> table[] = {
      {E::collision, {-1.0, -1.0}},          {E::missort, {-0.5, -0.5}},
      {E::invalid, {-0.01, -0.01}},          {E::transition_fired, {0.0, -0.001}},
      {E::non_action, {0.0, -0.001}},        {E::correct_delivery, {0.0, -0.001}},
      {E::goal_reached, {1.0, 1.0}},
  };
  for (const auto& [e, r] : table) {
    CHECK(reward(e, RewardVariant::r1) == r[0]);
    CHECK(reward(e, RewardVariant::r2) == r[1]);
  }
  CHECK(parse_reward_variant("R2") == RewardVariant::r2);
  CHECK_THROWS_AS(parse_reward_variant("r3"), ConfigError);
}

TEST_CASE("reset is deterministic and well formed") {
  SortingEnv env;
  const auto a = env.reset(7);
  const auto colors = env.colors();
  const auto b = env.reset(7);
  CHECK(a == b);
  CHECK(env.colors() == colors);
  CHECK(colors.size() == 3);
  check_blocks(env, a);
  // rest marking: every one-hot block sits on its first component
  for (const auto& blk : observation_blocks(env.topology()))
    if (blk.cls != petri::PlaceClass::storage) CHECK(a[static_cast<size_t>(blk.offset)] == 1.0);
}

TEST_CASE("explicit colors show up as storage counters") {
  SortingEnv env;
  const auto obs = env.reset(1, {Color::green});
  CHECK(obs[4] == 1.0);
  CHECK(obs[5] == 1.0);
  CHECK(obs[6] == 1.0);
  CHECK(obs[7] == 0.0);
  CHECK(env.tally().n_products == 1);
  CHECK_THROWS_AS(SortingEnv(EnvConfig{.n_products = 0}), ConfigError);
  CHECK_THROWS_AS(SortingEnv(EnvConfig{.n_products = 4}), ConfigError);
}

TEST_CASE("color draws are roughly fair") {
  int green = 0;
  for (std::uint64_t s = 0; s < 2'000; ++s)
    for (Color c : draw_colors(s, 3)) green += c == Color::green ? 1 : 0;
  CHECK(green > 2'800);
  CHECK(green < 3'200);
}

TEST_CASE("encoding of a product on the rotary table") {
  const auto topo = factory::build_factory();
  auto m = factory::inject_products(topo, {{Color::blue}});
  m.tokens[static_cast<size_t>(topo.place(Spot::rotary_table))].push_back(Token::product(Color::blue, false));
  const auto obs = encode_state(topo, m);
  const auto blk = observation_blocks(topo)[static_cast<size_t>(topo.place(Spot::rotary_table))];
  for (int i = 0; i < 6; ++i) CHECK(obs[static_cast<size_t>(blk.offset + i)] == (i == 2 ? 1.0 : 0.0));
  CHECK(regular_slot({}) == 0);
  CHECK(regular_slot({Token::carriage()}) == 1);
  CHECK(regular_slot({Token::product(Color::green, false)}) == 3);
  CHECK(regular_slot({Token::product(Color::blue, true)}) == 4);
  CHECK(regular_slot({Token::product(Color::green, true)}) == 5);

  auto bad = factory::inject_products(topo, {{Color::blue}});
  bad.tokens[static_cast<size_t>(topo.place(Spot::entry_belt))].push_back(Token::product(Color::green, true));
  CHECK_THROWS_AS(encode_state(topo, bad), EncodingError);
}

TEST_CASE("non-action and invalid steps") {
  SortingEnv r1(EnvConfig{.reward = RewardVariant::r1});
  SortingEnv r2(EnvConfig{.reward = RewardVariant::r2});
  const auto start = r1.reset(3);
  r2.reset(3);
  auto a = r1.step(kNon);
  CHECK(a.reward == 0.0);
  CHECK(a.info.event == EventKind::non_action);
  CHECK(r2.step(kNon).reward == -0.001);
  const auto before = r1.marking();
  auto inv = r1.step(static_cast<int>(Move::rotary_to_storage));
  CHECK(inv.info.event == EventKind::invalid);
  CHECK(inv.reward == -0.01);
  CHECK(inv.observation == start);
  CHECK(r1.marking().tokens == before.tokens);
  CHECK(r1.marking().tick == before.tick + 1);
  CHECK_THROWS_AS(r1.step(12), std::out_of_range);
}

TEST_CASE("a second load onto the occupied entry point collides") {
  SortingEnv env;
  env.reset(5);
  const int load = static_cast<int>(Move::load_parts);
  std::vector<StepResult> rs;
  for (int a : {load, kNon, load, kNon}) {
    rs.push_back(env.step(a));
    if (rs.back().terminated) break;
  }
  const auto& last = rs.back();
  CHECK(last.info.event == EventKind::collision);
  CHECK(last.reward == -1.0);
  CHECK(last.terminated);
  CHECK_FALSE(last.truncated);
  CHECK_THROWS_AS(env.step(kNon), EpisodeOver);
}

TEST_CASE("idling truncates at the step cap") {
  SortingEnv env;
  env.reset(1);
  for (int i = 1; i <= kDefaultMaxSteps; ++i) {
    const auto r = env.step(kNon);
    CHECK_FALSE(r.terminated);
    CHECK(r.truncated == (i == kDefaultMaxSteps));
  }
  CHECK_THROWS_AS(env.step(kNon), EpisodeOver);
}

TEST_CASE("scripted controller sorts every color sequence") {
  for (auto variant : {RewardVariant::r1, RewardVariant::r2}) {
    for (int bits = 0; bits < 8; ++bits) {
      SortingEnv env(EnvConfig{.reward = variant});
      const testing::ScriptedPolicy policy(env.topology());
      auto obs = env.reset(0, colors_of(bits, 3));
      double ret = 0.0;
      int invalid = 0, steps = 0;
      StepResult r;
      do {
        r = env.step(policy(obs));
        ret += r.reward;
        ++steps;
        invalid += r.info.event == EventKind::invalid ? 1 : 0;
        obs = r.observation;
      } while (!r.terminated && !r.truncated);
      CAPTURE(bits);
      CHECK(r.info.event == EventKind::goal_reached);
      CHECK(r.info.products_correct == 3);
      CHECK(invalid == 0);
      if (variant == RewardVariant::r1) CHECK(ret == 1.0);
      // every step but the goal step pays the step cost
      else CHECK(ret == doctest::Approx(1.0 - 0.001 * (steps - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("random play keeps every invariant") {
  const std::set<double> legal{-1.0, -0.5, -0.01, -0.001, 0.0, 1.0};
  for (auto variant : {RewardVariant::r1, RewardVariant::r2}) {
    SortingEnv env(EnvConfig{.reward = variant});
    Rng gen(42);
    for (int episode = 0; episode < 300; ++episode) {
      auto obs = env.reset(static_cast<std::uint64_t>(episode));
      check_blocks(env, obs);
      StepResult r;
      int steps = 0;
      do {
        r = env.step(uniform_index(gen, factory::kActionCount));
        ++steps;
        REQUIRE(legal.count(r.reward) == 1);
        REQUIRE_FALSE((r.terminated && r.truncated));
        const auto& t = env.tally();
        REQUIRE(factory::products_in_system(env.topology(), env.marking()) + t.correct + t.missorted == t.n_products);
        if (steps % 7 == 0) check_blocks(env, r.observation);
      } while (!r.terminated && !r.truncated);
      CHECK(steps <= kDefaultMaxSteps);
    }
  }
}

TEST_CASE("step streams are bit identical for a fixed seed and action sequence") {
  auto stream = [] {
    SortingEnv env;
    Rng gen(9);
    std::ostringstream out;
    TraceWriter trace(out);
    for (int e = 0; e < 20; ++e) {
      env.reset(static_cast<std::uint64_t>(e));
      trace.reset();
      StepResult r;
      do {
        const int a = uniform_index(gen, factory::kActionCount);
        r = env.step(a);
        trace.write(a, r);
      } while (!r.terminated && !r.truncated);
    }
    return out.str();
  };
  CHECK(stream() == stream());
}

TEST_CASE("trace replay reproduces the return") {
  SortingEnv env(EnvConfig{.reward = RewardVariant::r2});
  const testing::ScriptedPolicy policy(env.topology());
  std::ostringstream out;
  TraceWriter trace(out);
  auto obs = env.reset(11);
  double ret = 0.0;
  StepResult r;
  do {
    const int a = policy(obs);
    r = env.step(a);
    trace.write(a, r);
    ret += r.reward;
    obs = r.observation;
  } while (!r.terminated && !r.truncated);

  std::istringstream in(out.str());
  std::string line;
  double replay = 0.0;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("step").get<int>() == lines);
    CHECK(j.at("observation").size() == 101);
    const auto event = j.at("event").get<std::string>();
    const auto variant = RewardVariant::r2;
    double expect = reward(EventKind::transition_fired, variant);
    if (event == "goal_reached") expect = reward(EventKind::goal_reached, variant);
    if (event == "invalid") expect = reward(EventKind::invalid, variant);
    CHECK(j.at("reward").get<double>() == expect);
    replay += expect;
    ++lines;
  }
  CHECK(replay == doctest::Approx(ret).epsilon(1e-15));
}
