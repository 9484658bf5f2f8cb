#include "dll/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "dll/rng.hpp"

namespace dll {

size_t DenoiserModel::weight_offset(int l) const {
  size_t off = 0;
  for (int i = 0; i < l; ++i)
    off += static_cast<size_t>(arch.layer_out(i)) * arch.layer_in(i) + arch.layer_out(i);
  return off;
}

size_t DenoiserModel::bias_offset(int l) const {
  return weight_offset(l) + static_cast<size_t>(arch.layer_out(l)) * arch.layer_in(l);
}

void time_features(double t, double* out) {
  out[0] = t;
  out[1] = std::sin(2.0 * kPi * t);
  out[2] = std::cos(2.0 * kPi * t);
  out[3] = std::sin(4.0 * kPi * t);
  out[4] = std::cos(4.0 * kPi * t);
}

DenoiserModel init_model(const Architecture& arch, TargetSpace space, uint64_t seed) {
  arch.validate();
  DenoiserModel model;
  model.arch = arch;
  model.predict_space = space;
  model.params.assign(arch.param_count(), 0.0);
  size_t idx = 0;
  for (int l = 0; l < arch.num_layers; ++l) {
    const size_t nw = static_cast<size_t>(arch.layer_out(l)) * arch.layer_in(l);
    const double bound = std::sqrt(6.0 / (arch.layer_in(l) + arch.layer_out(l)));
    for (size_t i = 0; i < nw; ++i, ++idx)
      model.params[idx] = bound * (2.0 * rng::uniform01(seed, Stream::ParamInit, idx) - 1.0);
    idx += arch.layer_out(l);  // biases stay zero
  }
  return model;
}

void net_forward(const DenoiserModel& model, const double* z, const double* t, size_t n,
                 double* pred, NetWorkspace& ws) {
  const Architecture& arch = model.arch;
  const int L = arch.num_layers;
  const int in_dim = arch.input_dim();

  ws.n = n;
  ws.input.resize(n * in_dim);
  ws.hidden.resize(L - 1);
  for (int l = 0; l < L - 1; ++l) ws.hidden[l].resize(n * arch.layer_out(l));

  for (size_t i = 0; i < n; ++i) {
    double* row = ws.input.data() + i * in_dim;
    for (int d = 0; d < arch.data_dim; ++d) row[d] = z[i * arch.data_dim + d];
    time_features(t[i], row + arch.data_dim);
  }

  const double* cur = ws.input.data();
  for (int l = 0; l < L; ++l) {
    const size_t out_dim = arch.layer_out(l);
    double* dst = (l == L - 1) ? pred : ws.hidden[l].data();
    kernels::matmul_nt(cur, model.weights(l), dst, n, out_dim, arch.layer_in(l));
    kernels::add_row_bias(dst, model.biases(l), n, out_dim);
    if (l != L - 1) kernels::relu(dst, dst, n * out_dim);
    cur = dst;
  }
}

void net_backward(const DenoiserModel& model, const NetWorkspace& ws, const double* upstream,
                  size_t n, std::vector<double>& grad) {
  const Architecture& arch = model.arch;
  const int L = arch.num_layers;
  if (ws.n != n) throw DimensionError("net_backward: workspace does not match batch");

  grad.assign(model.params.size(), 0.0);
  auto& g_cur = const_cast<NetWorkspace&>(ws).g_a;
  auto& g_prev = const_cast<NetWorkspace&>(ws).g_b;
  g_cur.assign(upstream, upstream + n * arch.data_dim);

  for (int l = L - 1; l >= 0; --l) {
    const size_t out_dim = arch.layer_out(l);
    const size_t in_dim = arch.layer_in(l);
    const double* layer_input = (l == 0) ? ws.input.data() : ws.hidden[l - 1].data();
    // dW += G^T . input, db += column sums of G
    kernels::matmul_tn_acc(g_cur.data(), layer_input, grad.data() + model.weight_offset(l), n,
                           out_dim, in_dim);
    kernels::col_sum_acc(g_cur.data(), grad.data() + model.bias_offset(l), n, out_dim);
    if (l > 0) {
      g_prev.resize(n * in_dim);
      kernels::matmul_nn(g_cur.data(), model.weights(l), g_prev.data(), n, out_dim, in_dim);
      kernels::relu_mask(layer_input, g_prev.data(), g_prev.data(), n * in_dim);
      std::swap(g_cur, g_prev);
    }
  }
}

Prediction forward_one(const DenoiserModel& model, std::span<const double> z, TimePoint t) {
  if (z.size() != static_cast<size_t>(model.arch.data_dim))
    throw DimensionError("forward_one: z dimension mismatch");
  NetWorkspace ws;
  Prediction pred;
  pred.space = model.predict_space;
  pred.value.resize(model.arch.data_dim);
  const double tv = t.value();
  net_forward(model, z.data(), &tv, 1, pred.value.data(), ws);
  return pred;
}

std::vector<double> backward_one(const DenoiserModel& model, std::span<const double> z,
                                 TimePoint t, std::span<const double> upstream) {
  if (upstream.size() != static_cast<size_t>(model.arch.data_dim))
    throw DimensionError("backward_one: upstream dimension mismatch");
  NetWorkspace ws;
  std::vector<double> pred(model.arch.data_dim);
  const double tv = t.value();
  net_forward(model, z.data(), &tv, 1, pred.data(), ws);
  std::vector<double> grad;
  net_backward(model, ws, upstream.data(), 1, grad);
  return grad;
}

namespace {

constexpr char kMagic[4] = {'D', 'L', 'L', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& f, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  f.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::ifstream& f, const std::string& path) {
  unsigned char b[4];
  if (!f.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated checkpoint: " + path);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f64(std::ofstream& f, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  f.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::ifstream& f, const std::string& path) {
  unsigned char b[8];
  if (!f.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated checkpoint: " + path);
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void save_checkpoint(const DenoiserModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(kMagic, 4);
  put_u32(f, kVersion);
  put_u32(f, static_cast<uint32_t>(model.arch.data_dim));
  put_u32(f, static_cast<uint32_t>(model.arch.time_feature_dim));
  put_u32(f, static_cast<uint32_t>(model.arch.hidden_width));
  put_u32(f, static_cast<uint32_t>(model.arch.num_layers));
  put_u32(f, 0);  // activation: ReLU
  put_u32(f, static_cast<uint32_t>(model.predict_space));
  for (double p : model.params) put_f64(f, p);
  if (!f) throw IoError("write failed: " + path);
}

DenoiserModel load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("bad checkpoint magic in " + path);
  const uint32_t version = get_u32(f, path);
  if (version != kVersion) throw IoError("unsupported checkpoint version in " + path);

  DenoiserModel model;
  model.arch.data_dim = static_cast<int>(get_u32(f, path));
  model.arch.time_feature_dim = static_cast<int>(get_u32(f, path));
  model.arch.hidden_width = static_cast<int>(get_u32(f, path));
  model.arch.num_layers = static_cast<int>(get_u32(f, path));
  const uint32_t activation = get_u32(f, path);
  if (activation != 0) throw IoError("unsupported activation id in " + path);
  const uint32_t space = get_u32(f, path);
  if (space > 3) throw IoError("bad target space id in " + path);
  model.predict_space = static_cast<TargetSpace>(space);
  model.arch.validate();

  model.params.resize(model.arch.param_count());
  for (double& p : model.params) p = get_f64(f, path);
  // Nothing may trail the parameter block.
  char extra;
  if (f.read(&extra, 1)) throw IoError("trailing bytes in checkpoint " + path);
  return model;
}

}  // namespace dll
