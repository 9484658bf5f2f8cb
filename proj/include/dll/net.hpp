#pragma once

// The denoising network: 7 affine layers, ReLU after layers 1-6, linear
// output. Input is [z, time_features(t)]; the prediction is tagged with the
// model's target space. Gradients are exact reverse-mode, written by hand
// against the kernels module.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dll/kernels.hpp"
#include "dll/spaces.hpp"
#include "dll/target_space.hpp"

namespace dll {

inline constexpr int kTimeFeatureDim = 5;

struct Architecture {
  int data_dim = 2;
  int time_feature_dim = kTimeFeatureDim;
  int hidden_width = 128;
  int num_layers = 7;  // affine layers, counting the linear output

  int input_dim() const { return data_dim + time_feature_dim; }
  int layer_in(int l) const { return l == 0 ? input_dim() : hidden_width; }
  int layer_out(int l) const { return l == num_layers - 1 ? data_dim : hidden_width; }
  size_t param_count() const {
    size_t n = 0;
    for (int l = 0; l < num_layers; ++l)
      n += static_cast<size_t>(layer_out(l)) * layer_in(l) + layer_out(l);
    return n;
  }
  void validate() const {
    if (data_dim < 1 || hidden_width < 1 || num_layers < 2 || time_feature_dim != kTimeFeatureDim)
      throw RangeError("Architecture: invalid dimensions");
  }
};

// Parameters live in one flat array, layer by layer: W (row-major, out x in)
// then b. This is also the checkpoint payload order.
struct DenoiserModel {
  Architecture arch;
  TargetSpace predict_space = TargetSpace::Eps;
  std::vector<double> params;

  size_t weight_offset(int l) const;
  size_t bias_offset(int l) const;
  const double* weights(int l) const { return params.data() + weight_offset(l); }
  const double* biases(int l) const { return params.data() + bias_offset(l); }
};

// [t, sin(2 pi t), cos(2 pi t), sin(4 pi t), cos(4 pi t)]
void time_features(double t, double* out);

// Glorot-uniform weights, zero biases, deterministic in seed.
DenoiserModel init_model(const Architecture& arch, TargetSpace space, uint64_t seed);

// Reusable batched buffers; forward fills them, backward consumes them.
struct NetWorkspace {
  std::vector<double> input;               // n x input_dim
  std::vector<std::vector<double>> hidden; // post-ReLU activations, layers 0..L-2
  std::vector<double> g_a, g_b;            // gradient ping-pong buffers
  size_t n = 0;
};

// pred[n x data_dim] = model(z[n x data_dim], t[n])
void net_forward(const DenoiserModel& model, const double* z, const double* t, size_t n,
                 double* pred, NetWorkspace& ws);

// grad (flat, param_count) of sum_i upstream_i . model(z_i, t_i), given the
// workspace left by the matching net_forward call.
void net_backward(const DenoiserModel& model, const NetWorkspace& ws, const double* upstream,
                  size_t n, std::vector<double>& grad);

// Single-example convenience; returns the prediction tagged with the model space.
Prediction forward_one(const DenoiserModel& model, std::span<const double> z, TimePoint t);
std::vector<double> backward_one(const DenoiserModel& model, std::span<const double> z,
                                 TimePoint t, std::span<const double> upstream);

// Flat binary checkpoint: magic "DLLM", then u32 version, data_dim,
// time_feature_dim, hidden_width, num_layers, activation (0 = ReLU),
// predict_space, then the parameters as little-endian float64.
void save_checkpoint(const DenoiserModel& model, const std::string& path);
DenoiserModel load_checkpoint(const std::string& path);

// Batched prediction surface shared by the sampler and the evaluators. One
// instance per thread; the model itself is immutable.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual TargetSpace space() const = 0;
  virtual int data_dim() const = 0;
  virtual void predict(const double* z, const double* t, size_t n, double* out) const = 0;
};

class ModelPredictor final : public Predictor {
 public:
  explicit ModelPredictor(const DenoiserModel& model) : model_(&model) {}
  TargetSpace space() const override { return model_->predict_space; }
  int data_dim() const override { return model_->arch.data_dim; }
  void predict(const double* z, const double* t, size_t n, double* out) const override {
    net_forward(*model_, z, t, n, out, ws_);
  }

 private:
  const DenoiserModel* model_;
  mutable NetWorkspace ws_;
};

}  // namespace dll
