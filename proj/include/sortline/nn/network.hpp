#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sortline/errors.hpp"
#include "sortline/nn/matrix.hpp"

namespace sortline::nn {

class StaleCache : public std::logic_error {
 public:
  StaleCache() : std::logic_error("backward called without a preceding forward pass") {}
};

/// Dense feedforward network: rectifier hidden layers, identity output.
/// All parameters live in one flat vector, layer by layer, each layer as
/// its input-major weight block followed by its bias.
class Network {
 public:
  Network() = default;

  /// Uniform fan-in initialisation scaled for rectifiers, biases zero.
  Network(std::vector<int> sizes, std::uint64_t seed);

  static Network zeros(std::vector<int> sizes);

  [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
  [[nodiscard]] int input_size() const { return sizes_.front(); }
  [[nodiscard]] int output_size() const { return sizes_.back(); }
  [[nodiscard]] int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
  [[nodiscard]] size_t parameter_count() const { return params_.size(); }

  [[nodiscard]] std::span<const double> parameters() const { return params_; }
  /// Mutable access invalidates the activation cache.
  [[nodiscard]] std::span<double> mutable_parameters();
  void set_parameters(std::span<const double> values);

  [[nodiscard]] std::span<double> weights(int layer);
  [[nodiscard]] std::span<double> bias(int layer);
  [[nodiscard]] std::span<const double> weights(int layer) const;
  [[nodiscard]] std::span<const double> bias(int layer) const;

  /// Batched forward pass; keeps activations for backward.
  const Matrix& forward(const Matrix& input);
  std::vector<double> forward(std::span<const double> input);

  /// Gradient of the loss w.r.t. every parameter, given dloss/doutput for
  /// the batch of the most recent forward pass.
  std::vector<double> backward(const Matrix& output_grad);
  void backward(const Matrix& output_grad, std::span<double> grads);

  /// Copies parameters only; caches stay per instance.
  void copy_parameters_from(const Network& other);

  friend bool operator==(const Network& a, const Network& b) {
    return a.sizes_ == b.sizes_ && a.params_ == b.params_;
  }

 private:
  void layout();
  [[nodiscard]] size_t weight_offset(int layer) const { return offsets_[static_cast<size_t>(layer)]; }
  [[nodiscard]] size_t bias_offset(int layer) const {
    return offsets_[static_cast<size_t>(layer)] +
           static_cast<size_t>(sizes_[static_cast<size_t>(layer)]) * static_cast<size_t>(sizes_[static_cast<size_t>(layer) + 1]);
  }

  std::vector<int> sizes_;
  std::vector<double> params_;
  std::vector<size_t> offsets_;
  std::vector<Matrix> activations_;  // [0] is the input
  std::vector<Matrix> scratch_;
  bool cache_valid_ = false;
};

/// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

}  // namespace sortline::nn
