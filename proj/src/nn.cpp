#include "fogforge/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "fogforge/kernels.hpp"

#include "binio.hpp"

namespace fogforge {

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("Mlp: zero-sized layer");
  }
}

}  // namespace

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Mlp make_mlp(std::vector<std::size_t> dims) {
  check_dims(dims);
  Mlp net;
  net.dims = std::move(dims);
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    net.weights.emplace_back(net.dims[l + 1] * net.dims[l], 0.0);
    net.biases.emplace_back(net.dims[l + 1], 0.0);
  }
  return net;
}

Mlp make_mlp_random(std::vector<std::size_t> dims, RngStream& rng) {
  Mlp net = make_mlp(std::move(dims));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const double fan_in = static_cast<double>(net.dims[l]);
    const double fan_out = static_cast<double>(net.dims[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : net.weights[l]) w = rng.uniform(-limit, limit);
  }
  return net;
}

GradientSet make_gradients(const Mlp& net) {
  GradientSet g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

void GradientSet::zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

void GradientSet::scale(double a) {
  for (auto& w : weights) kernels::scale(w.data(), a, w.size());
  for (auto& b : biases) kernels::scale(b.data(), a, b.size());
}

void forward_ws(const Mlp& net, std::span<const double> x, MlpWorkspace& ws) {
  if (x.size() != net.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  const std::size_t layers = net.layer_count();
  ws.pre.resize(layers);
  ws.act.resize(layers + 1);
  ws.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t rows = net.dims[l + 1];
    const std::size_t cols = net.dims[l];
    ws.pre[l].resize(rows);
    kernels::affine(ws.pre[l].data(), net.weights[l].data(), net.biases[l].data(),
                    ws.act[l].data(), rows, cols);
    ws.act[l + 1].resize(rows);
    if (l + 1 < layers) {
      kernels::relu(ws.act[l + 1].data(), ws.pre[l].data(), rows);
    } else {
      ws.act[l + 1] = ws.pre[l];
    }
  }
}

std::vector<double> forward(const Mlp& net, std::span<const double> x) {
  MlpWorkspace ws;
  forward_ws(net, x, ws);
  return ws.act.back();
}

void backward_ws(const Mlp& net, const MlpWorkspace& ws, std::span<const double> dq,
                 GradientSet& grads) {
  const std::size_t layers = net.layer_count();
  if (dq.size() != net.output_dim()) throw std::invalid_argument("backward: output gradient dimension mismatch");
  if (grads.weights.size() != layers) throw std::invalid_argument("backward: gradient shape mismatch");
  std::vector<double> delta(dq.begin(), dq.end());
  std::vector<double> gx;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t rows = net.dims[l + 1];
    const std::size_t cols = net.dims[l];
    if (grads.weights[l].size() != rows * cols) throw std::invalid_argument("backward: gradient shape mismatch");
    kernels::outer_acc(grads.weights[l].data(), delta.data(), ws.act[l].data(), rows, cols);
    kernels::add_acc(grads.biases[l].data(), delta.data(), rows);
    if (l > 0) {
      gx.resize(cols);
      kernels::matvec_t(gx.data(), net.weights[l].data(), delta.data(), rows, cols);
      delta.resize(cols);
      kernels::relu_backward(delta.data(), ws.pre[l - 1].data(), gx.data(), cols);
    }
  }
}

void backward(const Mlp& net, std::span<const double> x, std::span<const double> dq,
              GradientSet& grads) {
  MlpWorkspace ws;
  forward_ws(net, x, ws);
  backward_ws(net, ws, dq, grads);
}

AdamState make_adam(const Mlp& net, double learning_rate) {
  AdamState opt;
  opt.learning_rate = learning_rate;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    opt.m_weights.emplace_back(net.weights[l].size(), 0.0);
    opt.v_weights.emplace_back(net.weights[l].size(), 0.0);
    opt.m_biases.emplace_back(net.biases[l].size(), 0.0);
    opt.v_biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return opt;
}

void adam_step(AdamState& opt, Mlp& net, const GradientSet& grads) {
  if (opt.m_weights.size() != net.weights.size()) throw std::invalid_argument("adam_step: shape mismatch");
  opt.step += 1;
  const double t = static_cast<double>(opt.step);
  const double bc1 = 1.0 / (1.0 - std::pow(opt.beta1, t));
  const double bc2 = 1.0 / (1.0 - std::pow(opt.beta2, t));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (grads.weights[l].size() != net.weights[l].size()) throw std::invalid_argument("adam_step: shape mismatch");
    kernels::adam_update(net.weights[l].data(), opt.m_weights[l].data(), opt.v_weights[l].data(),
                         grads.weights[l].data(), net.weights[l].size(), opt.learning_rate,
                         opt.beta1, opt.beta2, opt.eps, bc1, bc2);
    kernels::adam_update(net.biases[l].data(), opt.m_biases[l].data(), opt.v_biases[l].data(),
                         grads.biases[l].data(), net.biases[l].size(), opt.learning_rate,
                         opt.beta1, opt.beta2, opt.eps, bc1, bc2);
  }
}

using binio::read_f64;
using binio::read_u64;
using binio::read_vec;
using binio::write_f64;
using binio::write_u64;
using binio::write_vec;

void write_mlp(std::ostream& os, const Mlp& net) {
  write_u64(os, net.dims.size());
  for (std::size_t d : net.dims) write_u64(os, d);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    write_vec(os, net.weights[l]);
    write_vec(os, net.biases[l]);
  }
}

Mlp read_mlp(std::istream& is) {
  const std::uint64_t ndims = read_u64(is);
  if (ndims < 2 || ndims > 64) throw std::runtime_error("corrupt network header");
  std::vector<std::size_t> dims(ndims);
  for (auto& d : dims) d = read_u64(is);
  Mlp net = make_mlp(dims);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    net.weights[l] = read_vec(is);
    net.biases[l] = read_vec(is);
    if (net.weights[l].size() != dims[l + 1] * dims[l] || net.biases[l].size() != dims[l + 1]) {
      throw std::runtime_error("corrupt network payload");
    }
  }
  return net;
}

void write_adam(std::ostream& os, const AdamState& opt) {
  write_f64(os, opt.learning_rate);
  write_f64(os, opt.beta1);
  write_f64(os, opt.beta2);
  write_f64(os, opt.eps);
  write_u64(os, opt.step);
  write_u64(os, opt.m_weights.size());
  for (std::size_t l = 0; l < opt.m_weights.size(); ++l) {
    write_vec(os, opt.m_weights[l]);
    write_vec(os, opt.v_weights[l]);
    write_vec(os, opt.m_biases[l]);
    write_vec(os, opt.v_biases[l]);
  }
}

AdamState read_adam(std::istream& is) {
  AdamState opt;
  opt.learning_rate = read_f64(is);
  opt.beta1 = read_f64(is);
  opt.beta2 = read_f64(is);
  opt.eps = read_f64(is);
  opt.step = read_u64(is);
  const std::uint64_t layers = read_u64(is);
  if (layers > 64) throw std::runtime_error("corrupt optimizer header");
  for (std::uint64_t l = 0; l < layers; ++l) {
    opt.m_weights.push_back(read_vec(is));
    opt.v_weights.push_back(read_vec(is));
    opt.m_biases.push_back(read_vec(is));
    opt.v_biases.push_back(read_vec(is));
  }
  return opt;
}

}  // namespace fogforge
