#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include "fogforge/nn.hpp"
#include "fogforge/oracles.hpp"
#include "fogforge/rng.hpp"

using namespace fogforge;

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool nets_equal(const Mlp& a, const Mlp& b) {
  if (a.dims != b.dims) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (!bits_equal(a.weights[l], b.weights[l]) || !bits_equal(a.biases[l], b.biases[l])) {
      return false;
    }
  }
  return true;
}

// Loss L = sum_i c_i * out_i evaluated by plain forward passes.
double scalar_loss(const Mlp& net, const std::vector<double>& x, const std::vector<double>& c) {
  const auto out = forward(net, x);
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) loss += c[i] * out[i];
  return loss;
}

}  // namespace

TEST_CASE("make_mlp validates dims") {
  CHECK_THROWS_AS(make_mlp({}), std::invalid_argument);
  CHECK_THROWS_AS(make_mlp({5}), std::invalid_argument);
  CHECK_THROWS_AS(make_mlp({5, 0, 3}), std::invalid_argument);
  const Mlp net = make_mlp({4, 8, 2});
  CHECK(net.layer_count() == 2);
  CHECK(net.input_dim() == 4);
  CHECK(net.output_dim() == 2);
  CHECK(net.param_count() == 4 * 8 + 8 + 8 * 2 + 2);
  CHECK(net.weights[0].size() == 32);
  CHECK(net.biases[1].size() == 2);
}

TEST_CASE("single-layer forward is affine with identity output") {
  Mlp net = make_mlp({1, 1});
  net.weights[0] = {2.0};
  net.biases[0] = {1.0};
  CHECK(forward(net, std::vector<double>{3.0})[0] == 7.0);
  // Output layer must not be rectified.
  CHECK(forward(net, std::vector<double>{-3.0})[0] == -5.0);
}

TEST_CASE("two-layer forward matches hand computation through the ReLU") {
  Mlp net = make_mlp({2, 2, 1});
  net.weights[0] = {1.0, -1.0, 2.0, 0.5};  // W0 = [[1,2],[-1,0.5]] column-major
  net.biases[0] = {0.0, 0.25};
  net.weights[1] = {4.0, 5.0};
  net.biases[1] = {-2.0};

  const std::vector<double> x = {1.0, 1.0};
  // pre0 = (3, -0.25) -> hidden (3, 0) -> out 4*3 + 5*0 - 2 = 10.
  CHECK(forward(net, x)[0] == 10.0);

  MlpWorkspace ws;
  forward_ws(net, x, ws);
  CHECK(ws.act[0] == x);
  CHECK(ws.pre[0] == std::vector<double>{3.0, -0.25});
  CHECK(ws.act[1] == std::vector<double>{3.0, 0.0});
  CHECK(ws.act[2] == std::vector<double>{10.0});
}

TEST_CASE("backward matches hand-derived gradients and gates dead units") {
  Mlp net = make_mlp({2, 2, 1});
  net.weights[0] = {1.0, -1.0, 2.0, 0.5};
  net.biases[0] = {0.0, 0.25};
  net.weights[1] = {4.0, 5.0};
  net.biases[1] = {-2.0};

  GradientSet g = make_gradients(net);
  backward(net, std::vector<double>{1.0, 1.0}, std::vector<double>{1.0}, g);

  CHECK(g.weights[1] == std::vector<double>{3.0, 0.0});  // hidden activations
  CHECK(g.biases[1] == std::vector<double>{1.0});
  // Upstream 4 flows through the live unit; the dead unit (pre=-0.25) blocks 5.
  CHECK(g.weights[0] == std::vector<double>{4.0, 0.0, 4.0, 0.0});
  CHECK(g.biases[0] == std::vector<double>{4.0, 0.0});

  SUBCASE("backward accumulates instead of overwriting") {
    backward(net, std::vector<double>{1.0, 1.0}, std::vector<double>{1.0}, g);
    CHECK(g.biases[1] == std::vector<double>{2.0});
    CHECK(g.weights[0] == std::vector<double>{8.0, 0.0, 8.0, 0.0});
  }
  SUBCASE("zero and scale") {
    g.scale(0.5);
    CHECK(g.weights[1] == std::vector<double>{1.5, 0.0});
    g.zero();
    CHECK(g.weights[0] == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(g.biases[1] == std::vector<double>{0.0});
  }
}

TEST_CASE("backward agrees with central finite differences") {
  RngStream rng(2024);
  Mlp net = make_mlp_random({3, 5, 4, 2}, rng);
  const std::vector<double> c = {0.7, -1.3};

  // Keep every pre-activation away from the ReLU kink so the FD stencil
  // stays on one side of it.
  std::vector<double> x(3);
  MlpWorkspace ws;
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    forward_ws(net, x, ws);
    double closest = 1e300;
    for (std::size_t l = 0; l + 1 < ws.pre.size(); ++l) {
      for (double p : ws.pre[l]) closest = std::min(closest, std::abs(p));
    }
    if (closest > 1e-2) break;
  }

  GradientSet g = make_gradients(net);
  backward(net, x, c, g);

  const double h = 1e-5;
  double max_err = 0.0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t k = 0; k < net.weights[l].size(); ++k) {
      const double keep = net.weights[l][k];
      net.weights[l][k] = keep + h;
      const double up = scalar_loss(net, x, c);
      net.weights[l][k] = keep - h;
      const double dn = scalar_loss(net, x, c);
      net.weights[l][k] = keep;
      const double fd = (up - dn) / (2 * h);
      max_err = std::max(max_err, std::abs(g.weights[l][k] - fd) / std::max(1.0, std::abs(fd)));
    }
    for (std::size_t k = 0; k < net.biases[l].size(); ++k) {
      const double keep = net.biases[l][k];
      net.biases[l][k] = keep + h;
      const double up = scalar_loss(net, x, c);
      net.biases[l][k] = keep - h;
      const double dn = scalar_loss(net, x, c);
      net.biases[l][k] = keep;
      const double fd = (up - dn) / (2 * h);
      max_err = std::max(max_err, std::abs(g.biases[l][k] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  CHECK(max_err <= 1e-6);
}

TEST_CASE("the packaged gradient oracle passes at its acceptance tolerance") {
  const OracleReport r = gradient_oracle(10, 1e-4, 77);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("make_mlp_random respects the fan-based bound and the seed") {
  RngStream a(5), b(5), c(6);
  const Mlp na = make_mlp_random({7, 11, 3}, a);
  const Mlp nb = make_mlp_random({7, 11, 3}, b);
  const Mlp nc = make_mlp_random({7, 11, 3}, c);
  CHECK(nets_equal(na, nb));
  CHECK(!nets_equal(na, nc));

  const double l0 = std::sqrt(6.0 / (7 + 11));
  const double l1 = std::sqrt(6.0 / (11 + 3));
  for (double w : na.weights[0]) REQUIRE(std::abs(w) <= l0);
  for (double w : na.weights[1]) REQUIRE(std::abs(w) <= l1);
  for (const auto& bias : na.biases) {
    for (double v : bias) REQUIRE(v == 0.0);
  }
  // Degenerate-but-legal: no hidden layer at all.
  RngStream d(7);
  const Mlp tiny = make_mlp_random({2, 3}, d);
  CHECK(tiny.layer_count() == 1);
}

TEST_CASE("adam_step at t=1 steps by about lr * sign(gradient)") {
  Mlp net = make_mlp({1, 2});
  net.weights[0] = {1.0, -1.0};
  net.biases[0] = {0.5, 0.5};
  AdamState opt = make_adam(net, 0.01);
  CHECK(opt.step == 0);

  GradientSet g = make_gradients(net);
  g.weights[0] = {0.4, -0.4};
  g.biases[0] = {2.0, 0.0};
  adam_step(opt, net, g);

  CHECK(opt.step == 1);
  CHECK(net.weights[0][0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(net.weights[0][1] == doctest::Approx(-1.0 + 0.01).epsilon(1e-6));
  CHECK(net.biases[0][0] == doctest::Approx(0.5 - 0.01).epsilon(1e-6));
  CHECK(net.biases[0][1] == 0.5);  // zero gradient, zero moments: no motion
}

TEST_CASE("repeated adam steps on a quadratic drive the weight to the minimum") {
  // L(w) = (w - 3)^2 on a {1,1} net with b frozen at 0 by zero bias grads.
  Mlp net = make_mlp({1, 1});
  net.weights[0] = {-2.0};
  AdamState opt = make_adam(net, 0.05);
  GradientSet g = make_gradients(net);
  const std::vector<double> x = {1.0};
  for (int i = 0; i < 2000; ++i) {
    const double w = net.weights[0][0];
    g.zero();
    g.weights[0][0] = 2.0 * (w - 3.0);
    adam_step(opt, net, g);
  }
  CHECK(net.weights[0][0] == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(forward(net, x)[0] == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("training soak keeps every parameter finite") {
  RngStream rng(404);
  Mlp net = make_mlp_random({8, 16, 4}, rng);
  AdamState opt = make_adam(net, 1e-3);
  GradientSet g = make_gradients(net);
  std::vector<double> x(8), dq(4);
  for (int step = 0; step < 500; ++step) {
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    for (auto& v : dq) v = rng.uniform(-1.0, 1.0);
    g.zero();
    backward(net, x, dq, g);
    adam_step(opt, net, g);
  }
  for (const auto& layer : net.weights) {
    for (double w : layer) REQUIRE(std::isfinite(w));
  }
  for (const auto& layer : net.biases) {
    for (double b : layer) REQUIRE(std::isfinite(b));
  }
}

TEST_CASE("mlp and adam serialization round-trip bit-exactly") {
  RngStream rng(31337);
  Mlp net = make_mlp_random({6, 32, 32, 5}, rng);
  AdamState opt = make_adam(net, 2.5e-4);
  GradientSet g = make_gradients(net);
  std::vector<double> x(6), dq(5);
  for (int step = 0; step < 10; ++step) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : dq) v = rng.uniform(-1.0, 1.0);
    g.zero();
    backward(net, x, dq, g);
    adam_step(opt, net, g);
  }

  std::stringstream buf;
  write_mlp(buf, net);
  write_adam(buf, opt);
  const Mlp net2 = read_mlp(buf);
  const AdamState opt2 = read_adam(buf);

  CHECK(nets_equal(net, net2));
  CHECK(opt2.step == opt.step);
  CHECK(opt2.learning_rate == opt.learning_rate);
  REQUIRE(opt2.m_weights.size() == opt.m_weights.size());
  for (std::size_t l = 0; l < opt.m_weights.size(); ++l) {
    REQUIRE(bits_equal(opt2.m_weights[l], opt.m_weights[l]));
    REQUIRE(bits_equal(opt2.v_weights[l], opt.v_weights[l]));
    REQUIRE(bits_equal(opt2.m_biases[l], opt.m_biases[l]));
    REQUIRE(bits_equal(opt2.v_biases[l], opt.v_biases[l]));
  }

  // Both copies must continue identically.
  Mlp n1 = net, n2 = net2;
  AdamState o1 = opt, o2 = opt2;
  GradientSet g1 = make_gradients(n1), g2 = make_gradients(n2);
  backward(n1, x, dq, g1);
  backward(n2, x, dq, g2);
  adam_step(o1, n1, g1);
  adam_step(o2, n2, g2);
  CHECK(nets_equal(n1, n2));
}

TEST_CASE("workspace instances can be reused across networks of different shape") {
  RngStream rng(9);
  const Mlp big = make_mlp_random({10, 20, 4}, rng);
  const Mlp small = make_mlp_random({2, 3}, rng);
  MlpWorkspace ws;
  std::vector<double> xb(10, 0.5), xs(2, -0.25);
  forward_ws(big, xb, ws);
  const auto out_big = ws.act.back();
  forward_ws(small, xs, ws);
  CHECK(ws.act.back().size() == 3);
  forward_ws(big, xb, ws);
  CHECK(ws.act.back() == out_big);
}
