#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bmc {

// Fully connected action-value network: ReLU hidden layers, linear output.
// Parameters live in one flat buffer, per layer weights (out x in, row-major)
// followed by biases.
class QNetwork {
 public:
  QNetwork() = default;
  // He-uniform initialisation from `seed`; biases start at zero.
  QNetwork(int inputs, std::vector<int> hidden, int outputs, std::uint64_t seed);

  int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Throws ValidationError on an input of the wrong length.
  std::vector<double> forward(std::span<const double> input) const;

  struct Sample {
    std::span<const double> input;
    int action;     // output index
    double target;  // regression target for that output
  };

  // Mean over samples of (target - Q(input)[action])^2.
  double loss(std::span<const Sample> batch) const;
  // Same loss; `grad` is resized to parameters().size() and overwritten.
  double loss_and_gradient(std::span<const Sample> batch, std::vector<double>& grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer] * sizes_[layer + 1]);
  }
  void forward_layers(std::span<const double> input, std::vector<std::vector<double>>& acts) const;

  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(std::size_t parameter_count, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace bmc
