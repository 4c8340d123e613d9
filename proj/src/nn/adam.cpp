#include "sortline/nn/adam.hpp"

#include <cmath>

#include "sortline/errors.hpp"

namespace sortline::nn {

Adam::Adam(size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ShapeError("optimizer state, parameters and gradients must have equal sizes");
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;
  const size_t n = params.size();
#pragma omp simd
  for (size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
  }
}

void Adam::restore(std::vector<double> m, std::vector<double> v, std::int64_t steps) {
  if (m.size() != m_.size() || v.size() != v_.size() || steps < 0)
    throw ShapeError("optimizer state does not match the parameter count");
  m_ = std::move(m);
  v_ = std::move(v);
  steps_ = steps;
}

}  // namespace sortline::nn
