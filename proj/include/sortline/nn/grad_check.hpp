#pragma once

#include <functional>

#include "sortline/nn/network.hpp"

namespace sortline::nn {

/// A scalar loss of the network output together with its analytic
/// derivative with respect to that output.
struct LossFunction {
  std::function<double(const Matrix&)> value;
  std::function<Matrix(const Matrix&)> gradient;
};

inline constexpr double kGradCheckStep = 1e-5;
/// Gradients below this magnitude are compared on an absolute scale.
inline constexpr double kGradCheckFloor = 1e-6;

/// Worst relative error between backpropagated gradients and central
/// finite differences over every parameter. Parameters are restored.
double grad_check(Network& net, const Matrix& input, const LossFunction& loss,
                  double step = kGradCheckStep);

}  // namespace sortline::nn
