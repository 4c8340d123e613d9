#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sortline/nn/adam.hpp"
#include "sortline/nn/checkpoint.hpp"
#include "sortline/nn/grad_check.hpp"
#include "sortline/nn/kernels.hpp"
#include "sortline/nn/network.hpp"

using namespace sortline;
using namespace sortline::nn;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto& v : m.data) v = p(rng) < zero_fraction ? 0.0 : u(rng);
  return m;
}

// Straight-line evaluation from the flat parameter layout.
Matrix oracle_forward(const Network& net, const Matrix& x) {
  Matrix a = x;
  for (int l = 0; l < net.layer_count(); ++l) {
    const int in = net.sizes()[static_cast<size_t>(l)];
    const int out = net.sizes()[static_cast<size_t>(l) + 1];
    auto w = net.weights(l);
    auto b = net.bias(l);
    Matrix z(a.rows, out);
    for (int r = 0; r < a.rows; ++r)
      for (int o = 0; o < out; ++o) {
        double s = b[static_cast<size_t>(o)];
        for (int i = 0; i < in; ++i) s += a(r, i) * w[static_cast<size_t>(i * out + o)];
        z(r, o) = (l + 1 < net.layer_count()) ? std::max(s, 0.0) : s;
      }
    a = std::move(z);
  }
  return a;
}

// Smallest |pre-activation| over the hidden layers. Central differences
// are only meaningful when no rectifier sits within a step of its kink.
double kink_margin(const Network& net, const Matrix& x) {
  double margin = INFINITY;
  Matrix a = x;
  for (int l = 0; l + 1 < net.layer_count(); ++l) {
    const int in = net.sizes()[static_cast<size_t>(l)];
    const int out = net.sizes()[static_cast<size_t>(l) + 1];
    Matrix z(a.rows, out);
    for (int r = 0; r < a.rows; ++r)
      for (int o = 0; o < out; ++o) {
        double s = net.bias(l)[static_cast<size_t>(o)];
        for (int i = 0; i < in; ++i) s += a(r, i) * net.weights(l)[static_cast<size_t>(i * out + o)];
        margin = std::min(margin, std::abs(s));
        z(r, o) = std::max(s, 0.0);
      }
    a = std::move(z);
  }
  return margin;
}

LossFunction half_squared() {
  return {[](const Matrix& y) {
            double s = 0.0;
            for (double v : y.data) s += 0.5 * v * v;
            return s;
          },
          [](const Matrix& y) { return y; }};
}

}  // namespace

TEST_CASE("forward of an all-zero network is zero") {
  auto net = Network::zeros({5, 7, 3});
  auto y = net.forward(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(y == std::vector<double>(3, 0.0));
}

TEST_CASE("identity single layer returns its input") {
  auto net = Network::zeros({4, 4});
  auto w = net.weights(0);
  for (int i = 0; i < 4; ++i) w[static_cast<size_t>(i * 4 + i)] = 1.0;
  std::vector<double> x{0.5, 1.0, 2.0, 3.5};
  CHECK(net.forward(x) == x);
}

TEST_CASE("forward matches a straight-line oracle") {
  std::mt19937_64 rng(7);
  Network net({101, 200, 100, 12}, 42);
  Matrix x = random_matrix(9, 101, rng, 0.7);
  const Matrix& y = net.forward(x);
  Matrix expect = oracle_forward(net, x);
  REQUIRE(y.rows == 9);
  for (size_t i = 0; i < y.data.size(); ++i) CHECK(y.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}

TEST_CASE("forward rejects the wrong input width") {
  Network net({3, 2}, 1);
  CHECK_THROWS_AS(net.forward(std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("initialisation is deterministic and bounded") {
  Network a({101, 200, 100, 12}, 5), b({101, 200, 100, 12}, 5), c({101, 200, 100, 12}, 6);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (int l = 0; l < a.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / a.sizes()[static_cast<size_t>(l)]);
    for (double w : a.weights(l)) CHECK(std::abs(w) <= limit);
    for (double v : a.bias(l)) CHECK(v == 0.0);
  }
}

TEST_CASE("backward") {
  SUBCASE("without forward is a stale cache") {
    Network net({3, 2}, 1);
    CHECK_THROWS_AS(net.backward(Matrix(1, 2)), StaleCache);
  }
  SUBCASE("zero output gradient gives zero parameter gradients") {
    Network net({6, 5, 4, 3}, 3);
    std::mt19937_64 rng(3);
    net.forward(random_matrix(4, 6, rng));
    auto g = net.backward(Matrix(4, 3));
    for (double v : g) CHECK(v == 0.0);
  }
  SUBCASE("scalar product rule") {
    auto net = Network::zeros({1, 1});
    net.weights(0)[0] = 0.7;
    net.forward(std::vector<double>{2.0});
    auto g = net.backward(Matrix(1, 1, 1.0));
    CHECK(g[0] == 2.0);  // dw
    CHECK(g[1] == 1.0);  // db
  }
  SUBCASE("forward/backward leaves parameters untouched") {
    Network net({6, 5, 3}, 9);
    std::vector<double> before(net.parameters().begin(), net.parameters().end());
    std::mt19937_64 rng(1);
    net.forward(random_matrix(3, 6, rng));
    net.backward(random_matrix(3, 3, rng));
    CHECK(std::equal(before.begin(), before.end(), net.parameters().begin()));
  }
}

TEST_CASE("gradient check against central differences") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (std::uint64_t seed = 100; checked < 10; ++seed) {
    Network net({7, 6, 5, 3}, seed);
    // random biases too, so every layer has non-trivial gradients
    for (int l = 0; l < net.layer_count(); ++l)
      for (auto& b : net.bias(l)) b = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
    Matrix x = random_matrix(4, 7, rng);
    if (kink_margin(net, x) < 1e-3) continue;
    CHECK(grad_check(net, x, half_squared()) < 1e-4);
    ++checked;
  }
}

TEST_CASE("gradient check conventions") {
  std::mt19937_64 rng(12);
  Network net({4, 5, 2}, 2);
  Matrix x = random_matrix(3, 4, rng);
  SUBCASE("zero loss reports zero error") {
    LossFunction zero{[](const Matrix&) { return 0.0; },
                      [](const Matrix& y) { return Matrix(y.rows, y.cols); }};
    CHECK(grad_check(net, x, zero) == 0.0);
  }
  SUBCASE("a sign-flipped gradient reports about 2") {
    LossFunction flipped = half_squared();
    flipped.gradient = [](const Matrix& y) {
      Matrix g = y;
      for (auto& v : g.data) v = -v;
      return g;
    };
    CHECK(grad_check(net, x, flipped) == doctest::Approx(2.0).epsilon(1e-4));
  }
  SUBCASE("parameters are restored") {
    std::vector<double> before(net.parameters().begin(), net.parameters().end());
    (void)grad_check(net, x, half_squared());
    CHECK(std::equal(before.begin(), before.end(), net.parameters().begin()));
  }
}

TEST_CASE("adam") {
  SUBCASE("zero gradient is a fixed point") {
    Adam opt(3, {});
    std::vector<double> p{1.0, -2.0, 0.5}, g(3, 0.0);
    auto before = p;
    for (int i = 0; i < 10; ++i) opt.step(p, g);
    CHECK(p == before);
    CHECK(opt.steps() == 10);
  }
  SUBCASE("constant gradient descends monotonically") {
    Adam opt(1, {.learning_rate = 1e-2});
    std::vector<double> p{3.0}, g{0.4};
    for (int i = 0; i < 200; ++i) {
      const double prev = p[0];
      opt.step(p, g);
      CHECK(p[0] < prev);
    }
  }
  SUBCASE("two steps match the closed form") {
    const AdamConfig cfg{.learning_rate = 0.1, .beta1 = 0.9, .beta2 = 0.999, .epsilon = 1e-8};
    Adam opt(1, cfg);
    std::vector<double> p{1.0};
    opt.step(p, std::vector<double>{0.5});
    // m = 0.05, v = 0.00025, mhat = 0.5, vhat = 0.25 -> step 0.1 * 0.5 / (0.5 + 1e-8)
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
    const double after_one = p[0];
    opt.step(p, std::vector<double>{-1.0});
    const double m = 0.9 * 0.05 + 0.1 * -1.0;
    const double v = 0.999 * 0.00025 + 0.001 * 1.0;
    const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
    CHECK(p[0] == doctest::Approx(after_one - 0.1 * mhat / (std::sqrt(vhat) + 1e-8)).epsilon(1e-14));
    CHECK(opt.first_moment()[0] == doctest::Approx(m));
    CHECK(opt.second_moment()[0] == doctest::Approx(v));
  }
  SUBCASE("shape mismatch") {
    Adam opt(2, {});
    std::vector<double> p{1.0, 2.0}, g{1.0};
    CHECK_THROWS_AS(opt.step(p, g), ShapeError);
  }
}

TEST_CASE("argmax breaks ties to the lowest index") {
  CHECK(argmax(std::vector<double>{0, 0, 0}) == 0);
  CHECK(argmax(std::vector<double>{1, 3, 3, 2}) == 1);
  CHECK(argmax(std::vector<double>{-5, -1}) == 1);
}

TEST_CASE("checkpoint round trip is bit identical") {
  std::mt19937_64 rng(4);
  Network net({101, 200, 100, 12}, 77);
  Checkpoint ck;
  ck.networks["q"] = net;
  ck.meta["episode"] = 12;
  auto path = std::filesystem::temp_directory_path() / "sortline_test_ckpt.json";
  save_checkpoint(ck, path);
  Checkpoint back = load_checkpoint(path);
  std::filesystem::remove(path);
  REQUIRE(back.networks.count("q") == 1);
  Network& loaded = back.networks.at("q");
  CHECK(loaded == net);
  CHECK(back.meta["episode"] == 12);
  Matrix x = random_matrix(5, 101, rng);
  Matrix a = net.forward(x);
  Matrix b = loaded.forward(x);
  CHECK(a == b);
}

TEST_CASE("checkpoint loader rejects mismatched shapes") {
  auto j = network_to_json(Network({3, 2}, 1));
  j["parameters"].erase(0);
  CHECK_THROWS_AS(network_from_json(j), ShapeError);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  std::mt19937_64 rng(99);
  const int shapes[][3] = {{1, 101, 200}, {64, 101, 200}, {64, 200, 100}, {64, 100, 12},
                           {7, 13, 5},    {33, 17, 24},   {64, 100, 1}};
  for (auto [batch, in, out] : shapes) {
    CAPTURE(batch);
    CAPTURE(in);
    CAPTURE(out);
    Matrix x = random_matrix(batch, in, rng, 0.5);
    Matrix w = random_matrix(in, out, rng);
    Matrix b = random_matrix(1, out, rng);
    Matrix dy = random_matrix(batch, out, rng);

    Matrix y1(batch, out), y2(batch, out);
    kernels::dense_forward(x.data.data(), batch, in, w.data.data(), b.data.data(), out, y1.data.data());
    reference::dense_forward(x.data.data(), batch, in, w.data.data(), b.data.data(), out, y2.data.data());
    for (size_t i = 0; i < y1.data.size(); ++i) CHECK(y1.data[i] == doctest::Approx(y2.data[i]).epsilon(1e-12));

    Matrix dx1(batch, in), dx2(batch, in);
    kernels::dense_backward_input(dy.data.data(), batch, out, w.data.data(), in, dx1.data.data());
    reference::dense_backward_input(dy.data.data(), batch, out, w.data.data(), in, dx2.data.data());
    for (size_t i = 0; i < dx1.data.size(); ++i) CHECK(dx1.data[i] == doctest::Approx(dx2.data[i]).epsilon(1e-12));

    Matrix dw1(in, out), dw2(in, out), db1(1, out), db2(1, out);
    kernels::dense_backward_params(x.data.data(), dy.data.data(), batch, in, out, dw1.data.data(), db1.data.data());
    reference::dense_backward_params(x.data.data(), dy.data.data(), batch, in, out, dw2.data.data(), db2.data.data());
    for (size_t i = 0; i < dw1.data.size(); ++i) CHECK(dw1.data[i] == doctest::Approx(dw2.data[i]).epsilon(1e-12));
    for (size_t i = 0; i < db1.data.size(); ++i) CHECK(db1.data[i] == doctest::Approx(db2.data[i]).epsilon(1e-12));
  }
}
