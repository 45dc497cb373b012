#include "bmc/qnetwork.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bmc/error.hpp"

namespace bmc {

QNetwork::QNetwork(int inputs, std::vector<int> hidden, int outputs, std::uint64_t seed) {
  if (inputs < 1 || outputs < 1) throw ValidationError("network needs inputs and outputs");
  sizes_.push_back(inputs);
  for (int h : hidden) {
    if (h < 1) throw ValidationError("hidden layer widths must be positive");
    sizes_.push_back(h);
  }
  sizes_.push_back(outputs);

  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l] * sizes_[l + 1] + sizes_[l + 1]);
  }
  params_.assign(total, 0.0);

  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / sizes_[l]);
    std::uniform_real_distribution<double> init(-limit, limit);
    const auto count = static_cast<std::size_t>(sizes_[l] * sizes_[l + 1]);
    for (std::size_t i = 0; i < count; ++i) params_[weight_offset(l) + i] = init(rng);
  }
}

void QNetwork::forward_layers(std::span<const double> input,
                              std::vector<std::vector<double>>& acts) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw ValidationError("network input has " + std::to_string(input.size()) +
                          " values, expected " + std::to_string(input_size()));
  }
  const std::size_t layers = sizes_.size() - 1;
  acts.resize(sizes_.size());
  acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(sizes_[l]);
    const auto out = static_cast<std::size_t>(sizes_[l + 1]);
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    auto& next = acts[l + 1];
    next.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += row[i] * acts[l][i];
      next[o] = (l + 1 < layers && z < 0.0) ? 0.0 : z;
    }
  }
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  std::vector<std::vector<double>> acts;
  forward_layers(input, acts);
  return std::move(acts.back());
}

double QNetwork::loss(std::span<const Sample> batch) const {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : batch) {
    const auto q = forward(s.input);
    const double err = s.target - q.at(static_cast<std::size_t>(s.action));
    total += err * err;
  }
  return total / static_cast<double>(batch.size());
}

double QNetwork::loss_and_gradient(std::span<const Sample> batch, std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  if (batch.empty()) return 0.0;
  const std::size_t layers = sizes_.size() - 1;
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev_delta;
  double total = 0.0;
  for (const auto& s : batch) {
    forward_layers(s.input, acts);
    const auto action = static_cast<std::size_t>(s.action);
    if (action >= acts.back().size()) throw ValidationError("action index outside network output");
    const double err = s.target - acts.back()[action];
    total += err * err;

    delta.assign(acts.back().size(), 0.0);
    delta[action] = -2.0 * err * scale;
    for (std::size_t l = layers; l-- > 0;) {
      const auto in = static_cast<std::size_t>(sizes_[l]);
      const auto out = static_cast<std::size_t>(sizes_[l + 1]);
      double* gw = grad.data() + weight_offset(l);
      double* gb = grad.data() + bias_offset(l);
      const double* w = params_.data() + weight_offset(l);
      const auto& x = acts[l];
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* grow = gw + o * in;
        const double* wrow = w + o * in;
        for (std::size_t i = 0; i < in; ++i) {
          grow[i] += d * x[i];
          prev_delta[i] += d * wrow[i];
        }
      }
      if (l > 0) {
        // ReLU derivative; activations of hidden layers are post-ReLU.
        for (std::size_t i = 0; i < in; ++i) {
          if (x[i] <= 0.0) prev_delta[i] = 0.0;
        }
      }
      delta.swap(prev_delta);
    }
  }
  return total * scale;
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
      m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ValidationError("optimizer state does not match the parameter count");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace bmc
