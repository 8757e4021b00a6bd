#include "fogforge/oracles.hpp"

#include <cmath>
#include <sstream>

#include "fogforge/harness.hpp"
#include "fogforge/nn.hpp"
#include "fogforge/repr.hpp"
#include "fogforge/rng.hpp"
#include "fogforge/sim.hpp"
#include "fogforge/topology.hpp"
#include "fogforge/workload.hpp"

namespace fogforge {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// Smallest valid world with a single cluster: every job is forced onto fog
// node 1, which then behaves as an isolated queue.
FogTopology mm1_topology() {
  FogTopology t;
  t.nodes = {NodeSpec{0, NodeRole::Cloud, 1.0, 1}, NodeSpec{1, NodeRole::Fog, 1.0, 1},
             NodeSpec{2, NodeRole::Fog, 1.0, 1}, NodeSpec{3, NodeRole::SourceCluster, 1.0, 1}};
  t.links = {LinkSpec{0, 1, 1000.0, 0.0}, LinkSpec{0, 2, 1000.0, 0.0},
             LinkSpec{1, 3, 1000.0, 0.0}};
  t.rebuild_adjacency();
  validate_topology(t);
  return t;
}

}  // namespace

OracleReport mm1_oracle(double rho, double horizon, double tol, std::uint64_t seed) {
  OracleReport r;
  r.name = "mm1 rho=" + fmt(rho);
  const double mu = 1.0;                  // ipt 1, mean instructions 1
  const double lambda = rho * mu;
  const FogTopology topo = mm1_topology();
  const std::vector<WorkloadCategory> cats{WorkloadCategory{"unit", 1.0, 1.0, 1.0}};
  GenerationConfig gen{1.0 / lambda, {1.0}};
  SimEngine engine(topo, cats, gen, seed);
  engine.set_keep_completed(false);
  engine.run_until(horizon, [](const Job&, SimEngine&) { return NodeId{1}; });

  const double l_expect = rho / (1.0 - rho);
  const double w_expect = 1.0 / (mu - lambda);
  const double l_got = engine.time_avg_queue(1);
  const double w_got = engine.metrics().mean_sojourn();
  const double l_err = std::abs(l_got - l_expect) / l_expect;
  const double w_err = std::abs(w_got - w_expect) / w_expect;
  r.passed = l_err <= tol && w_err <= tol;
  r.detail = "N=" + fmt(l_got) + " vs " + fmt(l_expect) + " (err " + fmt(l_err) + "), W=" +
             fmt(w_got) + " vs " + fmt(w_expect) + " (err " + fmt(w_err) + ")";
  return r;
}

OracleReport sampler_oracle(double beta, std::size_t draws, double tol, std::uint64_t seed) {
  OracleReport r;
  r.name = "sampler beta=" + fmt(beta);
  RngStream rng(mix_seed(seed, stream::kWorkload));
  double sum = 0.0;
  for (std::size_t i = 0; i < draws; ++i) sum += sample_interarrival(rng, beta);
  const double mean = sum / static_cast<double>(draws);
  const double err = std::abs(mean - beta) / beta;
  r.passed = err <= tol;
  r.detail = "mean=" + fmt(mean) + " vs " + fmt(beta) + " (err " + fmt(err) + ")";
  return r;
}

OracleReport vanishing_oracle(std::uint64_t updates, double tol, std::uint64_t seed) {
  OracleReport r;
  r.name = "vanishing normalization";
  LoadDistribution d(2, 3, 3);
  RngStream rng(seed);
  double worst = 0.0;
  bool law_holds = true;
  for (std::uint64_t i = 0; i < updates; ++i) {
    const auto c = rng.uniform_int(d.clusters());
    const auto w = rng.uniform_int(d.categories());
    const auto a = rng.uniform_int(d.actions());
    const std::vector<double> before = d.flat();
    d.update(c, w, a);
    // Exact halving law, checked bit for bit away from the renormalization
    // ticks (those intentionally rescale the table).
    if (d.update_count() % 10000 != 0) {
      const std::size_t hit = (c * d.categories() + w) * d.actions() + a;
      for (std::size_t k = 0; k < before.size(); ++k) {
        const double want = (before[k] + (k == hit ? 1.0 : 0.0)) * 0.5;
        if (d.flat()[k] != want) law_holds = false;
      }
    }
    worst = std::max(worst, std::abs(d.sum() - 1.0));
  }
  r.passed = worst <= tol && law_holds;
  r.detail = "max |sum-1| = " + fmt(worst) + (law_holds ? ", halving law exact" :
                                                          ", halving law VIOLATED");
  return r;
}

OracleReport gradient_oracle(std::size_t nets, double tol, std::uint64_t seed) {
  OracleReport r;
  r.name = "gradient check";
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t k = 0; k < nets; ++k) {
    RngStream rng(mix_seed(seed, 0x6772 + k));
    Mlp net = make_mlp_random({6, 16, 12, 4}, rng);
    // Keep pre-activations away from the ReLU kink so the finite difference
    // probes a smooth neighborhood.
    std::vector<double> x(6), c(4);
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);
      MlpWorkspace ws;
      forward_ws(net, x, ws);
      double closest = 1.0;
      for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
        for (double p : ws.pre[l]) closest = std::min(closest, std::abs(p));
      }
      if (closest > 1e-3) break;
    }
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);

    const auto loss_of = [&](const Mlp& m) {
      const auto out = forward(m, x);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += c[i] * out[i];
      return s;
    };

    GradientSet grads = make_gradients(net);
    backward(net, x, c, grads);

    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      for (std::size_t i = 0; i < net.weights[l].size() + net.biases[l].size(); ++i) {
        const bool is_bias = i >= net.weights[l].size();
        const std::size_t j = is_bias ? i - net.weights[l].size() : i;
        double& p = is_bias ? net.biases[l][j] : net.weights[l][j];
        const double analytic = is_bias ? grads.biases[l][j] : grads.weights[l][j];
        const double saved = p;
        p = saved + h;
        const double up = loss_of(net);
        p = saved - h;
        const double down = loss_of(net);
        p = saved;
        const double fd = (up - down) / (2.0 * h);
        const double err = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
      }
    }
  }
  r.passed = worst <= tol;
  r.detail = "max relative error " + fmt(worst) + " over " + std::to_string(nets) + " nets";
  return r;
}

OracleReport telescoping_oracle(std::uint64_t seed) {
  OracleReport r;
  r.name = "telescoping return";
  EnvSetup env = make_desk_env();
  PhaseSchedule sched;
  sched.phases = {PhaseSpec{100.0, 50, 2000.0, 3000.0}};
  AgentConfig cfg;
  cfg.buffer_capacity = 256;
  cfg.batch_size = 16;
  cfg.hidden_dims = {16};
  const TrialResult trial =
      run_lifelong(env, sched, TransferMode::Scratch, cfg, mix_seed(seed, 0x74656c));
  const auto& p = trial.phases.at(0);
  const double expect =
      static_cast<double>(p.q_first) - static_cast<double>(p.q_last);
  r.passed = p.episode_return == expect;
  r.detail = "return=" + fmt(p.episode_return) + " vs Q_first-Q_last=" + fmt(expect) +
             " over " + std::to_string(p.inference_decisions) + " decisions";
  return r;
}

}  // namespace fogforge
