#include "fogforge/agent.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "binio.hpp"

namespace fogforge {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  ring_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
  } else {
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  ++pushes_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= ring_.size()) throw std::out_of_range("ReplayBuffer: index out of range");
  if (ring_.size() < capacity_) return ring_[i];
  return ring_[(head_ + i) % capacity_];
}

void ReplayBuffer::clear() {
  ring_.clear();
  head_ = 0;
  pushes_ = 0;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(RngStream& rng, std::size_t count) const {
  if (count > ring_.size()) {
    throw std::invalid_argument("ReplayBuffer: cannot sample more than stored");
  }
  // Floyd's algorithm: uniform over index subsets, O(count) draws.
  std::vector<std::size_t> out;
  out.reserve(count);
  std::unordered_set<std::size_t> chosen;
  for (std::size_t i = ring_.size() - count; i < ring_.size(); ++i) {
    const std::size_t j = rng.uniform_int(i + 1);
    if (chosen.insert(j).second) {
      out.push_back(j);
    } else {
      chosen.insert(i);
      out.push_back(i);
    }
  }
  return out;
}

bool ReplayBuffer::operator==(const ReplayBuffer& other) const {
  if (capacity_ != other.capacity_ || pushes_ != other.pushes_ || size() != other.size()) {
    return false;
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(at(i) == other.at(i))) return false;
  }
  return true;
}

double EpsilonSchedule::value(std::uint64_t steps_done, std::uint64_t budget) const {
  const double decay_steps = decay_fraction * static_cast<double>(budget);
  if (decay_steps <= 0.0 || static_cast<double>(steps_done) >= decay_steps) return end;
  return start + (end - start) * (static_cast<double>(steps_done) / decay_steps);
}

namespace {

int argmax_lowest(const std::vector<double>& q) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i) {
    if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

double target_for(const Transition& tr, const Mlp& q_net, const Mlp& target_net, double gamma,
                  bool target_selects, MlpWorkspace& ws) {
  const Mlp& selector = target_selects ? target_net : q_net;
  const Mlp& evaluator = target_selects ? q_net : target_net;
  forward_ws(selector, tr.s2, ws);
  const int a_star = argmax_lowest(ws.act.back());
  forward_ws(evaluator, tr.s2, ws);
  return tr.reward + gamma * ws.act.back()[static_cast<std::size_t>(a_star)];
}

}  // namespace

std::vector<double> td_targets(std::span<const Transition> batch, const Mlp& q_net,
                               const Mlp& target_net, double gamma, bool target_selects) {
  if (q_net.dims != target_net.dims) {
    throw std::invalid_argument("td_targets: q_net and target_net shapes differ");
  }
  MlpWorkspace ws;
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& tr : batch) {
    out.push_back(target_for(tr, q_net, target_net, gamma, target_selects, ws));
  }
  return out;
}

namespace {

std::vector<std::size_t> agent_dims(const AgentConfig& cfg, std::size_t state_dim,
                                    std::size_t action_count) {
  std::vector<std::size_t> dims;
  dims.push_back(state_dim);
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(action_count);
  return dims;
}

void check_agent_config(const AgentConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw std::invalid_argument("agent: gamma must lie in [0, 1]");
  }
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("agent: learning_rate must be positive");
  if (cfg.batch_size == 0) throw std::invalid_argument("agent: batch_size must be positive");
  if (cfg.buffer_capacity < cfg.batch_size) {
    throw std::invalid_argument("agent: buffer_capacity must be >= batch_size");
  }
  if (cfg.target_sync_period == 0) {
    throw std::invalid_argument("agent: target_sync_period must be positive");
  }
  if (cfg.train_every == 0) throw std::invalid_argument("agent: train_every must be positive");
}

}  // namespace

DdqlAgent::DdqlAgent(AgentConfig cfg, std::size_t state_dim, std::size_t action_count,
                     std::uint64_t seed)
    : cfg_(std::move(cfg)),
      state_dim_(state_dim),
      action_count_(action_count),
      q_net_([&] {
        RngStream init(mix_seed(seed, stream::kAgentInit));
        return make_mlp_random(agent_dims(cfg_, state_dim, action_count), init);
      }()),
      target_net_(q_net_),
      opt_(make_adam(q_net_, cfg_.learning_rate)),
      buffer_(cfg_.buffer_capacity),
      exploration_rng_(mix_seed(seed, stream::kExploration)),
      sampling_rng_(mix_seed(seed, stream::kBufferSample)),
      current_epsilon_(cfg_.epsilon.start),
      grads_(make_gradients(q_net_)) {
  if (state_dim == 0 || action_count == 0) {
    throw std::invalid_argument("agent: state_dim and action_count must be positive");
  }
  check_agent_config(cfg_);
}

int DdqlAgent::greedy_action(std::span<const double> s) const {
  forward_ws(q_net_, s, ws_);
  return argmax_lowest(ws_.act.back());
}

int DdqlAgent::select_action(std::span<const double> s) {
  ++decision_steps_;
  // Always burn the exploration draw so greedy and exploring trajectories
  // consume the stream identically up to the chosen branch.
  const double u = exploration_rng_.uniform01();
  if (u < current_epsilon_) {
    return static_cast<int>(exploration_rng_.uniform_int(action_count_));
  }
  return greedy_action(s);
}

void DdqlAgent::observe(Transition t) {
  if (t.s.size() != state_dim_ || t.s2.size() != state_dim_) {
    throw std::invalid_argument("observe: state dimension mismatch");
  }
  if (t.action < 0 || t.action >= static_cast<int>(action_count_)) {
    throw std::invalid_argument("observe: action out of range");
  }
  buffer_.push(std::move(t));
}

std::optional<double> DdqlAgent::train_step() {
  if (buffer_.size() < cfg_.batch_size) return std::nullopt;
  const auto idx = buffer_.sample_indices(sampling_rng_, cfg_.batch_size);

  grads_.zero();
  const double inv_batch = 1.0 / static_cast<double>(cfg_.batch_size);
  std::vector<double> dq(action_count_, 0.0);
  double loss = 0.0;
  for (std::size_t i : idx) {
    const Transition& tr = buffer_.at(i);
    const double y = target_for(tr, q_net_, target_net_, cfg_.gamma, cfg_.target_selects, ws_);
    forward_ws(q_net_, tr.s, ws_);
    const double diff = ws_.act.back()[static_cast<std::size_t>(tr.action)] - y;
    loss += diff * diff;
    std::fill(dq.begin(), dq.end(), 0.0);
    dq[static_cast<std::size_t>(tr.action)] = 2.0 * diff * inv_batch;
    backward_ws(q_net_, ws_, dq, grads_);
  }
  loss *= inv_batch;

  adam_step(opt_, q_net_, grads_);
  ++training_steps_;
  if (training_steps_ % cfg_.target_sync_period == 0) target_net_ = q_net_;
  return loss;
}

Checkpoint DdqlAgent::to_checkpoint() const {
  Checkpoint ck;
  ck.config = cfg_;
  ck.state_dim = state_dim_;
  ck.action_count = action_count_;
  ck.decision_steps = decision_steps_;
  ck.training_steps = training_steps_;
  ck.current_epsilon = current_epsilon_;
  ck.q_net = q_net_;
  ck.target_net = target_net_;
  ck.opt = opt_;
  ck.buffer.reserve(buffer_.size());
  for (std::size_t i = 0; i < buffer_.size(); ++i) ck.buffer.push_back(buffer_.at(i));
  ck.buffer_push_count = buffer_.push_count();
  ck.exploration_rng = exploration_rng_.serialize();
  ck.sampling_rng = sampling_rng_.serialize();
  return ck;
}

DdqlAgent DdqlAgent::from_checkpoint(const Checkpoint& ck) {
  DdqlAgent agent(ck.config, ck.state_dim, ck.action_count, 0);
  agent.q_net_ = ck.q_net;
  agent.target_net_ = ck.target_net;
  agent.opt_ = ck.opt;
  agent.buffer_.clear();
  for (const auto& t : ck.buffer) agent.buffer_.push(t);
  // Replaying restores contents and order; the eviction counter is set last so
  // it reflects the original push history rather than the replay.
  agent.buffer_.set_push_count(ck.buffer_push_count);
  agent.exploration_rng_ = RngStream::deserialize(ck.exploration_rng);
  agent.sampling_rng_ = RngStream::deserialize(ck.sampling_rng);
  agent.decision_steps_ = ck.decision_steps;
  agent.training_steps_ = ck.training_steps;
  agent.current_epsilon_ = ck.current_epsilon;
  return agent;
}

namespace {

constexpr char kCheckpointMagic[4] = {'F', 'G', 'C', 'K'};
constexpr char kPolicyMagic[4] = {'F', 'G', 'I', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_magic(std::ostream& os, const char (&magic)[4]) { os.write(magic, 4); }

void check_magic(std::istream& is, const char (&magic)[4], const char* what) {
  char buf[4] = {};
  is.read(buf, 4);
  if (!is || !std::equal(buf, buf + 4, magic)) {
    throw CheckpointCorruptError(std::string(what) + ": bad magic");
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  using namespace binio;
  write_magic(out, kCheckpointMagic);
  write_u32(out, kCheckpointVersion);

  const AgentConfig& c = ck.config;
  write_f64(out, c.gamma);
  write_f64(out, c.learning_rate);
  write_u64(out, c.batch_size);
  write_u64(out, c.buffer_capacity);
  write_u64(out, c.target_sync_period);
  write_u64(out, c.train_every);
  write_u64(out, c.hidden_dims.size());
  for (std::size_t d : c.hidden_dims) write_u64(out, d);
  write_f64(out, c.epsilon.start);
  write_f64(out, c.epsilon.end);
  write_f64(out, c.epsilon.decay_fraction);
  write_u8(out, c.target_selects ? 1 : 0);
  write_u8(out, c.epsilon_resume_on_transfer ? 1 : 0);

  write_u64(out, ck.state_dim);
  write_u64(out, ck.action_count);
  write_u64(out, ck.decision_steps);
  write_u64(out, ck.training_steps);
  write_f64(out, ck.current_epsilon);

  write_mlp(out, ck.q_net);
  write_mlp(out, ck.target_net);
  write_adam(out, ck.opt);

  write_u64(out, ck.buffer_push_count);
  write_u64(out, ck.buffer.size());
  for (const auto& t : ck.buffer) {
    write_vec(out, t.s);
    write_u64(out, static_cast<std::uint64_t>(t.action));
    write_f64(out, t.reward);
    write_vec(out, t.s2);
    write_u8(out, t.truncated ? 1 : 0);
  }

  write_str(out, ck.exploration_rng);
  write_str(out, ck.sampling_rng);
}

Checkpoint read_checkpoint(std::istream& in) {
  using namespace binio;
  check_magic(in, kCheckpointMagic, "checkpoint");
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint: unsupported format version " +
                                 std::to_string(version));
  }
  try {
    Checkpoint ck;
    AgentConfig& c = ck.config;
    c.gamma = read_f64(in);
    c.learning_rate = read_f64(in);
    c.batch_size = read_u64(in);
    c.buffer_capacity = read_u64(in);
    c.target_sync_period = read_u64(in);
    c.train_every = read_u64(in);
    const std::uint64_t nh = read_u64(in);
    if (nh > 64) throw std::runtime_error("implausible hidden layer count");
    c.hidden_dims.resize(nh);
    for (auto& d : c.hidden_dims) d = read_u64(in);
    c.epsilon.start = read_f64(in);
    c.epsilon.end = read_f64(in);
    c.epsilon.decay_fraction = read_f64(in);
    c.target_selects = read_u8(in) != 0;
    c.epsilon_resume_on_transfer = read_u8(in) != 0;

    ck.state_dim = read_u64(in);
    ck.action_count = read_u64(in);
    ck.decision_steps = read_u64(in);
    ck.training_steps = read_u64(in);
    ck.current_epsilon = read_f64(in);

    ck.q_net = read_mlp(in);
    ck.target_net = read_mlp(in);
    ck.opt = read_adam(in);

    ck.buffer_push_count = read_u64(in);
    const std::uint64_t nbuf = read_u64(in);
    if (nbuf > c.buffer_capacity) throw std::runtime_error("buffer larger than its capacity");
    ck.buffer.resize(nbuf);
    for (auto& t : ck.buffer) {
      t.s = read_vec(in);
      t.action = static_cast<int>(read_u64(in));
      t.reward = read_f64(in);
      t.s2 = read_vec(in);
      t.truncated = read_u8(in) != 0;
    }

    ck.exploration_rng = read_str(in);
    ck.sampling_rng = read_str(in);
    return ck;
  } catch (const CheckpointCorruptError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointCorruptError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_checkpoint(out, ck);
  if (!out) throw std::runtime_error("failed writing: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_checkpoint(in);
}

int InferencePolicy::act(std::span<const double> s) const {
  if (net_.dims.empty()) throw std::logic_error("InferencePolicy: empty policy");
  forward_ws(net_, s, ws_);
  return argmax_lowest(ws_.act.back());
}

void InferencePolicy::save(const std::string& path) const {
  using namespace binio;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_magic(out, kPolicyMagic);
  write_u32(out, kCheckpointVersion);
  write_mlp(out, net_);
  if (!out) throw std::runtime_error("failed writing: " + path);
}

InferencePolicy InferencePolicy::load(const std::string& path) {
  using namespace binio;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  check_magic(in, kPolicyMagic, "policy");
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("policy: unsupported format version " + std::to_string(version));
  }
  try {
    return InferencePolicy(read_mlp(in));
  } catch (const std::exception& e) {
    throw CheckpointCorruptError(std::string("policy: ") + e.what());
  }
}

}  // namespace fogforge
