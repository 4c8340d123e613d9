#include <algorithm>
#include <cmath>
#include <numeric>

#include "sortline/errors.hpp"
#include "sortline/ppo/ppo.hpp"

namespace sortline::ppo {

void check_config(const PpoConfig& c) {
  if (!(c.clip_eps > 0.0 && c.clip_eps < 1.0)) throw ConfigError("clip epsilon must lie in (0, 1)");
  if (c.gamma < 0.0 || c.gamma > 1.0) throw ConfigError("gamma must lie in [0, 1]");
  if (c.lambda < 0.0 || c.lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
  if (c.epochs < 1 || c.minibatch < 1 || c.horizon < 1)
    throw ConfigError("epochs, minibatch and horizon must be positive");
  if (c.lr <= 0.0) throw ConfigError("learning rate must be positive");
}

double ratio(double logp_new, double logp_old) { return std::exp(logp_new - logp_old); }

double clipped_term(double r, double adv, double eps) {
  return std::min(r * adv, std::clamp(r, 1.0 - eps, 1.0 + eps) * adv);
}

double clipped_slope(double r, double adv, double eps) {
  return r * adv <= std::clamp(r, 1.0 - eps, 1.0 + eps) * adv ? adv : 0.0;
}

double clipped_objective(std::span<const double> ratios, std::span<const double> advantages,
                         double eps) {
  if (ratios.size() != advantages.size()) throw ShapeError("ratios and advantages differ in length");
  if (ratios.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < ratios.size(); ++i) sum += clipped_term(ratios[i], advantages[i], eps);
  return sum / static_cast<double>(ratios.size());
}

Advantages gae(const std::vector<double>& rewards, const std::vector<double>& values,
               const std::vector<double>& next_values, const std::vector<bool>& dones,
               const std::vector<bool>& truncateds, double gamma, double lambda) {
  const size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || dones.size() != n || truncateds.size() != n)
    throw ShapeError("advantage inputs must have equal lengths");
  Advantages out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (size_t k = n; k-- > 0;) {
    const double bootstrap = dones[k] ? 0.0 : gamma * next_values[k];
    const double delta = rewards[k] + bootstrap - values[k];
    const bool continues = !dones[k] && !truncateds[k] && k + 1 < n;
    next_adv = delta + (continues ? gamma * lambda * next_adv : 0.0);
    out.advantages[k] = next_adv;
    out.returns[k] = next_adv + values[k];
  }
  return out;
}

std::vector<double> normalize_advantages(std::vector<double> adv) {
  if (adv.empty()) return adv;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= n;
  if (var < 1e-8) {
    std::fill(adv.begin(), adv.end(), 0.0);
    return adv;
  }
  const double sd = std::sqrt(var);
  for (double& a : adv) a = (a - mean) / sd;
  return adv;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (size_t j = 0; j < logits.size(); ++j) out[j] = logits[j] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

double total_loss(const LossTerms& t, const PpoConfig& c) {
  return t.policy_loss + c.value_coef * t.value_loss - c.entropy_coef * t.entropy;
}

namespace {

void check_batch(int rows, const LossInputs& in) {
  const auto n = static_cast<size_t>(rows);
  if (in.actions.size() != n || in.old_log_probs.size() != n || in.advantages.size() != n ||
      in.returns.size() != n)
    throw ShapeError("loss inputs do not match the batch size");
}

// Policy terms over logits in columns [0, actions) of `out`, gradient
// written into the same columns of `grad`.
void policy_part(const nn::Matrix& out, int actions, const LossInputs& in, const PpoConfig& c,
                 LossTerms& terms, nn::Matrix& grad) {
  const int b = out.rows;
  const double inv = 1.0 / b;
  int clipped = 0;
  for (int i = 0; i < b; ++i) {
    const auto logits = out.row(i).first(static_cast<size_t>(actions));
    const auto logp = log_softmax(logits);
    const int a = in.actions[static_cast<size_t>(i)];
    if (a < 0 || a >= actions) throw ShapeError("action index outside the policy head");
    const double r = ratio(logp[static_cast<size_t>(a)], in.old_log_probs[static_cast<size_t>(i)]);
    const double adv = in.advantages[static_cast<size_t>(i)];
    terms.policy_loss -= clipped_term(r, adv, c.clip_eps) * inv;
    if (std::abs(r - 1.0) > c.clip_eps) ++clipped;

    double h = 0.0;
    for (double lp : logp) h -= std::exp(lp) * lp;
    terms.entropy += h * inv;

    // d(-obj)/dz_j = -slope * r * (1[j=a] - p_j)
    // d(-c_e H)/dz_j = c_e * p_j * (log p_j + H)
    const double g_obj = clipped_slope(r, adv, c.clip_eps) * r;
    for (int j = 0; j < actions; ++j) {
      const double p = std::exp(logp[static_cast<size_t>(j)]);
      const double dlogp = (j == a ? 1.0 : 0.0) - p;
      grad(i, j) = (-g_obj * dlogp + c.entropy_coef * p * (logp[static_cast<size_t>(j)] + h)) * inv;
    }
  }
  terms.clip_fraction = static_cast<double>(clipped) * inv;
}

void value_part(const nn::Matrix& out, int col, const LossInputs& in, const PpoConfig& c,
                LossTerms& terms, nn::Matrix& grad) {
  const double inv = 1.0 / out.rows;
  for (int i = 0; i < out.rows; ++i) {
    const double d = out(i, col) - in.returns[static_cast<size_t>(i)];
    terms.value_loss += d * d * inv;
    grad(i, col) = c.value_coef * 2.0 * d * inv;
  }
}

}  // namespace

LossGrad policy_loss(const nn::Matrix& logits, const LossInputs& in, const PpoConfig& c) {
  check_batch(logits.rows, in);
  LossGrad g;
  g.grad = nn::Matrix(logits.rows, logits.cols);
  policy_part(logits, logits.cols, in, c, g.terms, g.grad);
  return g;
}

LossGrad value_loss(const nn::Matrix& values, const LossInputs& in, const PpoConfig& c) {
  check_batch(values.rows, in);
  if (values.cols != 1) throw ShapeError("value head must have one output");
  LossGrad g;
  g.grad = nn::Matrix(values.rows, 1);
  value_part(values, 0, in, c, g.terms, g.grad);
  return g;
}

LossGrad composite_loss(const nn::Matrix& output, const LossInputs& in, const PpoConfig& c) {
  check_batch(output.rows, in);
  if (output.cols < 2) throw ShapeError("shared head needs logits and a value column");
  LossGrad g;
  g.grad = nn::Matrix(output.rows, output.cols);
  policy_part(output, output.cols - 1, in, c, g.terms, g.grad);
  value_part(output, output.cols - 1, in, c, g.terms, g.grad);
  return g;
}

}  // namespace sortline::ppo
