#include <doctest.h>

#include <cmath>

#include "sortline/dqn/dqn.hpp"
#include "sortline/dqn/replay_buffer.hpp"
#include "sortline/env/chain_env.hpp"
#include "sortline/errors.hpp"
#include "sortline/nn/grad_check.hpp"
#include "support/value_iteration.hpp"

using namespace sortline;
using namespace sortline::dqn;

namespace {

// Network whose output is the constant vector `q` whatever the input.
nn::Network constant_q(int inputs, std::vector<double> q) {
  auto net = nn::Network::zeros({inputs, 4, static_cast<int>(q.size())});
  std::copy(q.begin(), q.end(), net.bias(1).begin());
  return net;
}

Experience exp_of(double s0, int a, double r, double s1, bool done) {
  return {{s0, 1.0}, a, r, {s1, 1.0}, done};
}

DqnConfig chain_config() {
  DqnConfig c;
  c.gamma = 0.9;
  c.hidden = {32};
  c.lr = 1e-3;
  c.batch_size = 32;
  c.warmup = 64;
  c.sync_interval = 50;
  c.buffer_capacity = 5'000;
  c.eps_span = 200;
  return c;
}

}  // namespace

TEST_CASE("epsilon anneals linearly and then holds") {
  const EpsilonSchedule s{1.0, 0.1, 100};
  CHECK(s.value(0) == doctest::Approx(1.0));
  CHECK(s.value(50) == doctest::Approx(0.55));
  CHECK(s.value(100) == doctest::Approx(0.1));
  CHECK(s.value(10'000) == doctest::Approx(0.1));
  CHECK(EpsilonSchedule{1.0, 0.1, 0}.value(0) == doctest::Approx(0.1));
}

TEST_CASE("default schedule spans half the episode budget") {
  DqnAgent agent(2, 3, DqnConfig{.hidden = {4}}, 1'000, 1);
  CHECK(agent.schedule().span == 500);
  CHECK(agent.schedule().value(250) == doctest::Approx(0.55));
}

TEST_CASE("greedy selection takes the argmax, lowest index on ties") {
  auto q = constant_q(2, {0.1, 0.7, 0.7, -1.0});
  Rng gen(3);
  const std::vector<double> s{0.0, 1.0};
  for (int i = 0; i < 20; ++i) CHECK(select_action(q, s, 0.0, gen) == 1);
}

TEST_CASE("full exploration is uniform over actions") {
  auto q = constant_q(2, {5.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  Rng gen(11);
  const std::vector<double> s{0.0, 1.0};
  std::array<int, 6> counts{};
  const int n = 100'000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<size_t>(select_action(q, s, 1.0, gen))];
  double chi2 = 0.0;
  const double expected = n / 6.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 20.5);  // 5 dof, p = 0.001
}

TEST_CASE("replay buffer keeps the newest items in arrival order") {
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
  ReplayBuffer buf(3);
  CHECK(buf.empty());
  for (int i = 0; i < 5; ++i) buf.push(exp_of(i, i, i, i, false));
  REQUIRE(buf.size() == 3);
  CHECK(buf.at(0).a == 2);
  CHECK(buf.at(1).a == 3);
  CHECK(buf.at(2).a == 4);
  buf.clear();
  CHECK(buf.empty());
}

TEST_CASE("replay samples only stored items, with replacement") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 4; ++i) buf.push(exp_of(i, i, i, i, false));
  Rng gen(2);
  std::array<int, 4> seen{};
  for (const Experience* e : buf.sample(4'000, gen)) ++seen[static_cast<size_t>(e->a)];
  for (int c : seen) CHECK(c > 850);
}

TEST_CASE("temporal-difference targets") {
  auto target = constant_q(2, {0.5, 1.0, -2.0});
  const auto terminal = exp_of(0, 0, 1.0, 1, true);
  const auto ongoing = exp_of(0, 0, 1.0, 1, false);
  const Experience* batch[] = {&terminal, &ongoing};
  const auto y = td_targets(batch, target, 0.98);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.98));
}

TEST_CASE("batched targets agree with a per-sample loop") {
  nn::Network target({3, 8, 4}, 5);
  std::vector<Experience> items;
  Rng gen(9);
  for (int i = 0; i < 17; ++i)
    items.push_back({{unit_uniform(gen), unit_uniform(gen), unit_uniform(gen)}, i % 4, unit_uniform(gen) - 0.5,
                     {unit_uniform(gen), unit_uniform(gen), unit_uniform(gen)}, i % 5 == 0});
  std::vector<const Experience*> batch;
  for (const auto& e : items) batch.push_back(&e);
  const auto y = td_targets(batch, target, 0.9);
  for (size_t i = 0; i < items.size(); ++i) {
    const auto q = target.forward(std::span<const double>(items[i].s_next));
    const double expect = items[i].done ? items[i].r : items[i].r + 0.9 * *std::max_element(q.begin(), q.end());
    CHECK(y[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("Huber loss on single samples") {
  nn::Matrix q(1, 3);
  q(0, 1) = 2.0;
  const int a[] = {1};
  SUBCASE("quadratic zone") {
    const double y[] = {1.5};
    const auto l = huber_q_loss(q, a, y, 1.0);
    CHECK(l.value == doctest::Approx(0.125));
    CHECK(l.grad(0, 1) == doctest::Approx(0.5));
    CHECK(l.grad(0, 0) == 0.0);
    CHECK(l.grad(0, 2) == 0.0);
  }
  SUBCASE("linear zone") {
    const double y[] = {-1.0};
    const auto l = huber_q_loss(q, a, y, 1.0);
    CHECK(l.value == doctest::Approx(2.5));
    CHECK(l.grad(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("perfect prediction") {
    const double y[] = {2.0};
    const auto l = huber_q_loss(q, a, y, 1.0);
    CHECK(l.value == 0.0);
    CHECK(l.grad(0, 1) == 0.0);
  }
  SUBCASE("shape mismatch") {
    const double y[] = {1.0, 2.0};
    CHECK_THROWS_AS(huber_q_loss(q, a, y, 1.0), ShapeError);
  }
}

TEST_CASE("Q-loss gradient matches finite differences") {
  nn::Network net({6, 10, 8, 4}, 21);
  Rng gen(4);
  int checked = 0;
  for (int point = 0; point < 10; ++point) {
    nn::Matrix x(5, 6);
    for (auto& v : x.data) v = 2.0 * unit_uniform(gen) - 1.0;
    std::vector<int> actions;
    std::vector<double> targets;
    const auto q = net.forward(x);
    for (int i = 0; i < 5; ++i) {
      actions.push_back(uniform_index(gen, 4));
      // keep |q - y| clear of the Huber corner at delta
      const double off = (i % 2 == 0 ? 0.3 : 2.5) * (unit_uniform(gen) < 0.5 ? -1 : 1);
      targets.push_back(q(i, actions.back()) + off);
    }
    nn::LossFunction loss{
        [&](const nn::Matrix& out) { return huber_q_loss(out, actions, targets, 1.0).value; },
        [&](const nn::Matrix& out) { return huber_q_loss(out, actions, targets, 1.0).grad; }};
    CHECK(nn::grad_check(net, x, loss) < 1e-4);
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("update refuses to run before warmup") {
  DqnConfig c{.warmup = 10, .hidden = {4}};
  DqnLearner learner(2, 2, c, 1);
  ReplayBuffer buf(100);
  for (int i = 0; i < 9; ++i) buf.push(exp_of(0, 0, 0, 0, false));
  Rng gen(1);
  CHECK_THROWS_AS(dqn_update(learner, buf, c, gen), BufferTooSmall);
  buf.push(exp_of(0, 0, 0, 0, false));
  CHECK_NOTHROW(dqn_update(learner, buf, c, gen));
}

TEST_CASE("target network syncs exactly every sync_interval updates") {
  DqnConfig c{.batch_size = 4, .warmup = 4, .sync_interval = 3, .lr = 1e-2, .hidden = {6}};
  DqnLearner learner(2, 3, c, 7);
  ReplayBuffer buf(50);
  for (int i = 0; i < 20; ++i) buf.push(exp_of(i * 0.1, i % 3, 1.0, i * 0.1 + 0.1, i % 4 == 0));
  Rng gen(5);
  const auto initial = learner.target;
  dqn_update(learner, buf, c, gen);
  dqn_update(learner, buf, c, gen);
  CHECK(learner.target == initial);
  CHECK_FALSE(learner.online == initial);
  dqn_update(learner, buf, c, gen);
  CHECK(learner.target == learner.online);
}

TEST_CASE("perfect predictions leave the network unchanged") {
  // Q is constant 0 and every transition is terminal with reward 0.
  DqnConfig c{.batch_size = 8, .warmup = 8, .hidden = {5}};
  DqnLearner learner(2, 2, c, 3);
  learner.online = nn::Network::zeros({2, 5, 2});
  learner.target = learner.online;
  ReplayBuffer buf(20);
  for (int i = 0; i < 10; ++i) buf.push(exp_of(i, i % 2, 0.0, i, true));
  Rng gen(1);
  const auto before = learner.online;
  CHECK(dqn_update(learner, buf, c, gen) == 0.0);
  CHECK(learner.online == before);
}

TEST_CASE("agent rejects bad settings") {
  CHECK_THROWS_AS(DqnAgent(2, 2, DqnConfig{.gamma = 1.0}, 10, 1), ConfigError);
  CHECK_THROWS_AS(DqnAgent(2, 2, DqnConfig{.eps_start = 0.1, .eps_end = 0.5}, 10, 1), ConfigError);
}

TEST_CASE("training is deterministic for a seed") {
  auto run = [] {
    env::ChainEnv env;
    DqnAgent agent(5, 2, chain_config(), 40, 17);
    std::vector<double> rewards;
    for (int e = 0; e < 40; ++e) rewards.push_back(agent.train_episode(env, derive_seed(17, 3, e)).reward);
    return std::pair{rewards, agent.learner().online};
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("resume state round-trips the learner") {
  env::ChainEnv env;
  DqnAgent a(5, 2, chain_config(), 40, 2);
  for (int e = 0; e < 20; ++e) a.train_episode(env, derive_seed(2, 3, e));
  DqnAgent b(5, 2, chain_config(), 40, 99);
  b.load_state(nlohmann::json::parse(a.save_state().dump()));
  CHECK(b.learner().online == a.learner().online);
  CHECK(b.learner().target == a.learner().target);
  CHECK(b.learner().updates == a.learner().updates);
  CHECK(b.episodes_done() == a.episodes_done());
  CHECK(b.buffer().empty());
}

TEST_CASE("DQN recovers Q* on the chain") {
  const env::ChainConfig chain;
  const auto cfg = chain_config();
  const auto q_star = testing::chain_q_star(chain, cfg.gamma);
  env::ChainEnv env(chain);
  DqnAgent agent(chain.states, 2, cfg, 400, 5);
  for (int e = 0; e < 400; ++e) agent.train_episode(env, derive_seed(5, 3, e));

  const auto best = testing::greedy_actions(q_star);
  double worst = 0.0;
  for (int s = 0; s < chain.states; ++s) {
    const auto obs = testing::one_hot(chain.states, s);
    const auto q = agent.learner().online.forward(std::span<const double>(obs));
    CHECK(agent.act(obs) == best[static_cast<size_t>(s)]);
    for (int a = 0; a < 2; ++a)
      worst = std::max(worst, std::abs(q[static_cast<size_t>(a)] - q_star[static_cast<size_t>(s)][static_cast<size_t>(a)]));
  }
  MESSAGE("max |Q - Q*| = " << worst);
  CHECK(worst < 0.05);
}
