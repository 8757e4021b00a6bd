#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fogforge/rng.hpp"

// Multilayer perceptron for the Q-function: rectifier hidden layers,
// identity output, double precision throughout. Heavy loops live in
// fogforge::kernels. Weights are column-major (out x in, column j at
// offset j*out) to match the kernel layout.

namespace fogforge {

struct Mlp {
  std::vector<std::size_t> dims;                // dims.size() >= 2
  std::vector<std::vector<double>> weights;     // per layer, dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;      // per layer, dims[l+1]

  std::size_t input_dim() const { return dims.front(); }
  std::size_t output_dim() const { return dims.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t param_count() const;

  bool operator==(const Mlp&) const = default;
};

// Zero-initialized network; throws on dims with fewer than 2 entries or a 0.
Mlp make_mlp(std::vector<std::size_t> dims);

// Symmetric uniform fan-based init: U(-L, L) with L = sqrt(6/(fan_in+fan_out)),
// biases zero. Draws in layer order, column-major within a layer.
Mlp make_mlp_random(std::vector<std::size_t> dims, RngStream& rng);

// Per-layer intermediates from a forward pass; reusable across calls.
struct MlpWorkspace {
  std::vector<std::vector<double>> pre;   // pre[l]  = W_l a_l + b_l
  std::vector<std::vector<double>> act;   // act[0] = x, act[l+1] = activation(pre[l])
};

struct GradientSet {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  void zero();
  void scale(double a);
};

GradientSet make_gradients(const Mlp& net);

std::vector<double> forward(const Mlp& net, std::span<const double> x);
// Fills ws; ws.act.back() is the output vector.
void forward_ws(const Mlp& net, std::span<const double> x, MlpWorkspace& ws);

// Gradients of the scalar loss whose output-gradient is dq; ACCUMULATES into
// grads (callers batch by summing and scaling).
void backward(const Mlp& net, std::span<const double> x, std::span<const double> dq,
              GradientSet& grads);
void backward_ws(const Mlp& net, const MlpWorkspace& ws, std::span<const double> dq,
                 GradientSet& grads);

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m_weights, v_weights, m_biases, v_biases;

  bool operator==(const AdamState&) const = default;
};

AdamState make_adam(const Mlp& net, double learning_rate);
void adam_step(AdamState& opt, Mlp& net, const GradientSet& grads);

// Raw binary (little-endian doubles); bit-exact round trip.
void write_mlp(std::ostream& os, const Mlp& net);
Mlp read_mlp(std::istream& is);
void write_adam(std::ostream& os, const AdamState& opt);
AdamState read_adam(std::istream& is);

}  // namespace fogforge
