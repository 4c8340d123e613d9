#include "sortline/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sortline/nn/kernels.hpp"
#include "sortline/random.hpp"

namespace sortline::nn {

Network::Network(std::vector<int> sizes, std::uint64_t seed) : sizes_(std::move(sizes)) {
  layout();
  Rng gen(seed);
  for (int l = 0; l < layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / sizes_[static_cast<size_t>(l)]);
    for (double& w : weights(l)) w = (2.0 * unit_uniform(gen) - 1.0) * limit;
  }
}

Network Network::zeros(std::vector<int> sizes) {
  Network net;
  net.sizes_ = std::move(sizes);
  net.layout();
  return net;
}

void Network::layout() {
  if (sizes_.size() < 2) throw ShapeError("a network needs at least an input and an output layer");
  for (int s : sizes_)
    if (s < 1) throw ShapeError("layer sizes must be positive");
  offsets_.clear();
  size_t total = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(total);
    const auto in = static_cast<size_t>(sizes_[static_cast<size_t>(l)]);
    const auto out = static_cast<size_t>(sizes_[static_cast<size_t>(l) + 1]);
    total += in * out + out;
  }
  params_.assign(total, 0.0);
  activations_.assign(sizes_.size(), Matrix{});
  scratch_.assign(sizes_.size(), Matrix{});
  cache_valid_ = false;
}

std::span<double> Network::mutable_parameters() {
  cache_valid_ = false;
  return params_;
}

void Network::set_parameters(std::span<const double> values) {
  if (values.size() != params_.size()) throw ShapeError("parameter count mismatch");
  std::copy(values.begin(), values.end(), params_.begin());
  cache_valid_ = false;
}

void Network::copy_parameters_from(const Network& other) {
  if (other.sizes_ != sizes_) throw ShapeError("cannot copy parameters between different shapes");
  params_ = other.params_;
  cache_valid_ = false;
}

std::span<double> Network::weights(int l) {
  cache_valid_ = false;
  return {params_.data() + weight_offset(l),
          static_cast<size_t>(sizes_[static_cast<size_t>(l)]) * static_cast<size_t>(sizes_[static_cast<size_t>(l) + 1])};
}

std::span<double> Network::bias(int l) {
  cache_valid_ = false;
  return {params_.data() + bias_offset(l), static_cast<size_t>(sizes_[static_cast<size_t>(l) + 1])};
}

std::span<const double> Network::weights(int l) const {
  return {params_.data() + weight_offset(l),
          static_cast<size_t>(sizes_[static_cast<size_t>(l)]) * static_cast<size_t>(sizes_[static_cast<size_t>(l) + 1])};
}

std::span<const double> Network::bias(int l) const {
  return {params_.data() + bias_offset(l), static_cast<size_t>(sizes_[static_cast<size_t>(l) + 1])};
}

const Matrix& Network::forward(const Matrix& input) {
  if (input.cols != input_size())
    throw ShapeError("input has " + std::to_string(input.cols) + " columns, network expects " +
                     std::to_string(input_size()));
  activations_[0] = input;
  const int batch = input.rows;
  for (int l = 0; l < layer_count(); ++l) {
    const int in = sizes_[static_cast<size_t>(l)];
    const int out = sizes_[static_cast<size_t>(l) + 1];
    Matrix& y = activations_[static_cast<size_t>(l) + 1];
    if (y.rows != batch || y.cols != out) y.resize(batch, out);
    kernels::dense_forward(activations_[static_cast<size_t>(l)].data.data(), batch, in,
                           params_.data() + weight_offset(l), params_.data() + bias_offset(l), out,
                           y.data.data());
    if (l + 1 < layer_count()) kernels::relu(y.data.data(), batch * out);
  }
  cache_valid_ = true;
  return activations_.back();
}

std::vector<double> Network::forward(std::span<const double> input) {
  const Matrix& y = forward(Matrix::from_row(input));
  return y.data;
}

std::vector<double> Network::backward(const Matrix& output_grad) {
  std::vector<double> grads(params_.size(), 0.0);
  backward(output_grad, grads);
  return grads;
}

void Network::backward(const Matrix& output_grad, std::span<double> grads) {
  if (!cache_valid_) throw StaleCache();
  if (grads.size() != params_.size()) throw ShapeError("gradient buffer has the wrong size");
  const int batch = activations_[0].rows;
  if (output_grad.rows != batch || output_grad.cols != output_size())
    throw ShapeError("output gradient shape does not match the cached batch");
  std::fill(grads.begin(), grads.end(), 0.0);

  Matrix delta = output_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const int in = sizes_[static_cast<size_t>(l)];
    const int out = sizes_[static_cast<size_t>(l) + 1];
    const Matrix& x = activations_[static_cast<size_t>(l)];
    kernels::dense_backward_params(x.data.data(), delta.data.data(), batch, in, out,
                                   grads.data() + weight_offset(l), grads.data() + bias_offset(l));
    if (l == 0) break;
    Matrix& prev = scratch_[static_cast<size_t>(l)];
    if (prev.rows != batch || prev.cols != in) prev.resize(batch, in);
    kernels::dense_backward_input(delta.data.data(), batch, out, params_.data() + weight_offset(l),
                                  in, prev.data.data());
    kernels::relu_backward(x.data.data(), prev.data.data(), batch * in);
    std::swap(delta, prev);
  }
}

int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace sortline::nn
