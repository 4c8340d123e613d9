#include <benchmark/benchmark.h>

#include <vector>

#include "sortline/env/sorting_env.hpp"
#include "sortline/nn/kernels.hpp"
#include "sortline/random.hpp"

using namespace sortline;

namespace {

struct Layer {
  int batch, in, out;
  std::vector<double> x, w, b, y, dy, dx, dw, db;

  explicit Layer(const benchmark::State& st)
      : batch(static_cast<int>(st.range(0))), in(static_cast<int>(st.range(1))), out(static_cast<int>(st.range(2))) {
    Rng gen(7);
    auto fill = [&](std::vector<double>& v, size_t n) {
      v.resize(n);
      for (auto& e : v) e = unit_uniform(gen) - 0.5;
    };
    const auto B = static_cast<size_t>(batch), I = static_cast<size_t>(in), O = static_cast<size_t>(out);
    fill(x, B * I);
    fill(w, I * O);
    fill(b, O);
    fill(dy, B * O);
    y.resize(B * O);
    dx.resize(B * I);
    dw.assign(I * O, 0.0);
    db.assign(O, 0.0);
  }
  [[nodiscard]] double flops() const { return 2.0 * batch * in * out; }
};

// batch x in x out: the first hidden layer of both learners at minibatch and
// single-sample sizes, and the second hidden layer
void shapes(benchmark::internal::Benchmark* b) {
  b->Args({1, 101, 200})->Args({32, 101, 200})->Args({64, 101, 200})->Args({32, 200, 100})->Args({256, 200, 100});
}

template <bool Parallel>
void BM_forward(benchmark::State& st) {
  Layer l(st);
  for (auto _ : st) {
    if constexpr (Parallel)
      nn::kernels::dense_forward(l.x.data(), l.batch, l.in, l.w.data(), l.b.data(), l.out, l.y.data());
    else
      nn::reference::dense_forward(l.x.data(), l.batch, l.in, l.w.data(), l.b.data(), l.out, l.y.data());
    benchmark::DoNotOptimize(l.y.data());
  }
  st.counters["flops"] = benchmark::Counter(l.flops(), benchmark::Counter::kIsIterationInvariantRate);
}

template <bool Parallel>
void BM_backward(benchmark::State& st) {
  Layer l(st);
  for (auto _ : st) {
    if constexpr (Parallel) {
      nn::kernels::dense_backward_input(l.dy.data(), l.batch, l.out, l.w.data(), l.in, l.dx.data());
      nn::kernels::dense_backward_params(l.x.data(), l.dy.data(), l.batch, l.in, l.out, l.dw.data(), l.db.data());
    } else {
      nn::reference::dense_backward_input(l.dy.data(), l.batch, l.out, l.w.data(), l.in, l.dx.data());
      nn::reference::dense_backward_params(l.x.data(), l.dy.data(), l.batch, l.in, l.out, l.dw.data(), l.db.data());
    }
    benchmark::DoNotOptimize(l.dx.data());
    benchmark::DoNotOptimize(l.dw.data());
  }
  st.counters["flops"] = benchmark::Counter(2.0 * l.flops(), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_env_step(benchmark::State& st) {
  env::SortingEnv env;
  Rng gen(3);
  std::uint64_t episode = 0;
  env.reset(episode);
  for (auto _ : st) {
    const auto r = env.step(uniform_index(gen, factory::kActionCount));
    if (r.terminated || r.truncated) env.reset(++episode);
    benchmark::DoNotOptimize(r.reward);
  }
  st.SetItemsProcessed(st.iterations());
}

}  // namespace

BENCHMARK(BM_forward<true>)->Name("forward/openmp")->Apply(shapes);
BENCHMARK(BM_forward<false>)->Name("forward/reference")->Apply(shapes);
BENCHMARK(BM_backward<true>)->Name("backward/openmp")->Apply(shapes);
BENCHMARK(BM_backward<false>)->Name("backward/reference")->Apply(shapes);
BENCHMARK(BM_env_step)->Name("env/step");

BENCHMARK_MAIN();
