#include "sortline/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace sortline::nn {

double grad_check(Network& net, const Matrix& input, const LossFunction& loss, double step) {
  const Matrix& y = net.forward(input);
  const std::vector<double> analytic = net.backward(loss.gradient(y));

  std::vector<double> params(net.parameters().begin(), net.parameters().end());
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    net.mutable_parameters()[i] = saved + step;
    const double up = loss.value(net.forward(input));
    net.mutable_parameters()[i] = saved - step;
    const double down = loss.value(net.forward(input));
    net.mutable_parameters()[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

}  // namespace sortline::nn
