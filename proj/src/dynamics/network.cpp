#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "ska/dynamics.hpp"

namespace ska {

namespace {
constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
}

void NetworkConfig::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("network needs an input size and at least one layer");
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] == 0)
      throw std::invalid_argument("layer_sizes[" + std::to_string(i) + "] must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (steps == 0) throw std::invalid_argument("steps must be at least 1");
  if (!(init_std_scale >= 0.0) || !std::isfinite(init_std_scale))
    throw std::invalid_argument("init_std_scale must be non-negative");
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& z) {
  return elementwise(z, [](double v) { return sigmoid(v); });
}

double entropy_gradient(double z) noexcept {
  const double s = sigmoid(z);
  return -kInvLn2 * z * s * (1.0 - s);
}

Matrix entropy_gradient(const Matrix& z, const Matrix& d) {
  require_same_shape("entropy_gradient", z, d);
  std::vector<double> out(z.size());
  auto zs = z.flat(), ds = d.flat();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -kInvLn2 * zs[i] * ds[i] * (1.0 - ds[i]);
  return Matrix(z.rows(), z.cols(), std::move(out));
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  for (std::size_t l = 0; l + 1 < config_.layer_sizes.size(); ++l) {
    const std::size_t fan_in = config_.layer_sizes[l];
    const std::size_t fan_out = config_.layer_sizes[l + 1];
    std::normal_distribution<double> init(0.0, config_.init_std_scale / std::sqrt(double(fan_in)));
    std::vector<double> w(fan_out * fan_in);
    if (config_.init_std_scale > 0.0)
      for (double& v : w) v = init(rng);
    layers_.push_back(LayerState{Matrix(fan_out, fan_in, std::move(w)), {}, {}, {}, {}});
  }
}

void Network::set_weights(std::size_t layer, Matrix weights) {
  if (layer >= layers_.size())
    throw std::out_of_range("set_weights: layer " + std::to_string(layer) + " of " +
                            std::to_string(layers_.size()));
  require_same_shape("set_weights", layers_[layer].weights, weights);
  layers_[layer].weights = std::move(weights);
}

StepRecord Network::forward(const Matrix& x) {
  if (x.cols() != config_.layer_sizes.front())
    throw ShapeError("forward", x.shape(), layers_.front().weights.shape());
  StepRecord rec;
  rec.step = forward_count_;
  rec.time = static_cast<double>(forward_count_) * config_.dt;
  inputs_.clear();
  const Matrix* input = &x;
  for (auto& layer : layers_) {
    inputs_.push_back(*input);
    Matrix z = matmul(*input, transpose(layer.weights));
    Matrix d = sigmoid(z);
    // A batch-size change between passes leaves nothing to difference.
    if (layer.z && layer.z->shape() == z.shape()) {
      layer.prev_z = std::move(layer.z);
      layer.prev_d = std::move(layer.d);
    } else {
      layer.prev_z.reset();
      layer.prev_d.reset();
    }
    layer.z = z;
    layer.d = d;
    LayerRecord lr{z, d, entropy_gradient(z, d), {}, {}};
    if (layer.prev_z) {
      lr.dz = sub(z, *layer.prev_z);
      lr.dd = sub(d, *layer.prev_d);
    }
    rec.layers.push_back(std::move(lr));
    input = &*layer.d;
  }
  ++forward_count_;
  return rec;
}

StepRecord Network::step(const Matrix& x, double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be non-negative");
  StepRecord rec = forward(x);
  std::vector<Matrix> updates;
  updates.reserve(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l)
    updates.push_back(outer_mean(rec.layers[l].gradient, inputs_[l]));
  for (std::size_t l = 0; l < layers_.size(); ++l)
    layers_[l].weights = sub_scaled(layers_[l].weights, updates[l], dt);
  ++step_index_;
  return rec;
}

}  // namespace ska
