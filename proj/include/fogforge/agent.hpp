#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogforge/nn.hpp"
#include "fogforge/rng.hpp"

namespace fogforge {

struct Transition {
  std::vector<double> s;
  int action = 0;
  double reward = 0.0;
  std::vector<double> s2;
  // Marks episode boundaries for analysis; the TD target still bootstraps
  // through it because queue state carries across episodes.
  bool truncated = false;

  bool operator==(const Transition&) const = default;
};

// Fixed-capacity ring; once full, each push evicts the oldest transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t push_count() const { return pushes_; }

  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;
  void clear();
  // Checkpoint restore only: contents were replayed via push, so the eviction
  // counter must be reset to the recorded history.
  void set_push_count(std::uint64_t pushes) { pushes_ = pushes; }

  // `count` distinct indices, uniform over the current contents.
  std::vector<std::size_t> sample_indices(RngStream& rng, std::size_t count) const;

  bool operator==(const ReplayBuffer& other) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // slot the next push overwrites once full
  std::uint64_t pushes_ = 0;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.6;  // fraction of the phase budget spent decaying

  // Linear from start to end over decay_fraction * budget training steps,
  // then flat at end.
  double value(std::uint64_t steps_done, std::uint64_t budget) const;

  bool operator==(const EpsilonSchedule&) const = default;
};

struct AgentConfig {
  double gamma = 0.99;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 10000;
  std::uint64_t target_sync_period = 200;
  std::uint64_t train_every = 4;  // decision steps per training step
  std::vector<std::size_t> hidden_dims{64, 64};
  EpsilonSchedule epsilon;
  // Default: the online net picks the next action, the target net scores it.
  // Flipping this swaps the two roles.
  bool target_selects = false;
  // Whether transferred weights resume exploration at the floor instead of
  // restarting the decay.
  bool epsilon_resume_on_transfer = true;

  bool operator==(const AgentConfig&) const = default;
};

// Everything needed to reconstruct an agent mid-run.
struct Checkpoint {
  AgentConfig config;
  std::size_t state_dim = 0;
  std::size_t action_count = 0;
  std::uint64_t decision_steps = 0;
  std::uint64_t training_steps = 0;
  double current_epsilon = 1.0;
  Mlp q_net;
  Mlp target_net;
  AdamState opt;
  std::vector<Transition> buffer;  // oldest to newest
  std::uint64_t buffer_push_count = 0;
  std::string exploration_rng;
  std::string sampling_rng;
};

class CheckpointVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointCorruptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Frozen greedy policy detached from optimizer, buffer and exploration state.
class InferencePolicy {
 public:
  InferencePolicy() = default;
  explicit InferencePolicy(Mlp net) : net_(std::move(net)) {}

  int act(std::span<const double> s) const;  // argmax, ties to lowest index
  const Mlp& net() const { return net_; }

  void save(const std::string& path) const;
  static InferencePolicy load(const std::string& path);

 private:
  Mlp net_;
  mutable MlpWorkspace ws_;
};

class DdqlAgent {
 public:
  DdqlAgent(AgentConfig cfg, std::size_t state_dim, std::size_t action_count,
            std::uint64_t seed);
  static DdqlAgent from_checkpoint(const Checkpoint& ck);

  int select_action(std::span<const double> s);           // epsilon-greedy
  int greedy_action(std::span<const double> s) const;     // ties to lowest index
  void observe(Transition t);                             // push into the buffer

  // One minibatch update; std::nullopt while the buffer holds fewer than
  // batch_size transitions. Returns the minibatch loss otherwise.
  std::optional<double> train_step();

  void set_epsilon(double eps) { current_epsilon_ = eps; }
  double epsilon() const { return current_epsilon_; }

  std::uint64_t decision_steps() const { return decision_steps_; }
  std::uint64_t training_steps() const { return training_steps_; }

  const AgentConfig& config() const { return cfg_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_count() const { return action_count_; }
  const Mlp& q_net() const { return q_net_; }
  const Mlp& target_net() const { return target_net_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  InferencePolicy export_inference() const { return InferencePolicy(q_net_); }
  Checkpoint to_checkpoint() const;

 private:
  AgentConfig cfg_;
  std::size_t state_dim_;
  std::size_t action_count_;
  Mlp q_net_;
  Mlp target_net_;
  AdamState opt_;
  ReplayBuffer buffer_;
  RngStream exploration_rng_;
  RngStream sampling_rng_;
  std::uint64_t decision_steps_ = 0;
  std::uint64_t training_steps_ = 0;
  double current_epsilon_ = 1.0;
  mutable MlpWorkspace ws_;
  GradientSet grads_;
};

// TD targets for a minibatch: y_i = r_i + gamma * Q_eval(s2_i, a*_i) where a*
// comes from the selection net. With target_selects = false the online net
// selects and the target net evaluates.
std::vector<double> td_targets(std::span<const Transition> batch, const Mlp& q_net,
                               const Mlp& target_net, double gamma, bool target_selects);

}  // namespace fogforge
