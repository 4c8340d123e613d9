#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sortline::nn {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment optimiser with bias correction.
class Adam {
 public:
  Adam() = default;
  Adam(size_t parameter_count, AdamConfig config);

  /// Throws ShapeError when sizes disagree.
  void step(std::span<double> params, std::span<const double> grads);

  [[nodiscard]] std::int64_t steps() const { return steps_; }
  [[nodiscard]] const AdamConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<double>& first_moment() const { return m_; }
  [[nodiscard]] const std::vector<double>& second_moment() const { return v_; }

  /// Reinstates saved moments; throws ShapeError if they differ in size.
  void restore(std::vector<double> m, std::vector<double> v, std::int64_t steps);

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t steps_ = 0;
};

}  // namespace sortline::nn
