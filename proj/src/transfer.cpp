#include "fogforge/transfer.hpp"

#include <stdexcept>

namespace fogforge {

const char* transfer_mode_name(TransferMode m) {
  switch (m) {
    case TransferMode::Scratch: return "scratch";
    case TransferMode::FirstOnly: return "first";
    case TransferMode::BufferOnly: return "buffer";
    case TransferMode::WeightsOnly: return "weights";
    case TransferMode::Full: return "full";
  }
  return "?";
}

TransferMode transfer_mode_from_name(const std::string& s) {
  if (s == "scratch") return TransferMode::Scratch;
  if (s == "first") return TransferMode::FirstOnly;
  if (s == "buffer") return TransferMode::BufferOnly;
  if (s == "weights") return TransferMode::WeightsOnly;
  if (s == "full") return TransferMode::Full;
  throw std::invalid_argument("unknown transfer mode: " + s);
}

bool resets_weights(TransferMode mode) {
  return mode == TransferMode::Scratch || mode == TransferMode::BufferOnly;
}

PhaseAgent initialize_phase_agent(TransferMode mode, const Checkpoint& prev,
                                  std::uint64_t fresh_seed) {
  // Start from a wholly fresh agent (new weights, optimizer, streams, empty
  // buffer), then overwrite exactly the pieces the mode carries over.
  DdqlAgent fresh(prev.config, prev.state_dim, prev.action_count, fresh_seed);
  Checkpoint next = fresh.to_checkpoint();

  const bool resume_eps = prev.config.epsilon_resume_on_transfer;
  bool train_enabled = true;
  bool epsilon_resumed = false;

  switch (mode) {
    case TransferMode::Scratch:
      break;
    case TransferMode::FirstOnly:
      next.q_net = prev.q_net;
      next.target_net = prev.target_net;
      next.training_steps = prev.training_steps;
      train_enabled = false;
      break;
    case TransferMode::BufferOnly:
      next.buffer = prev.buffer;
      next.buffer_push_count = prev.buffer_push_count;
      break;
    case TransferMode::WeightsOnly:
      next.q_net = prev.q_net;
      next.target_net = prev.target_net;
      epsilon_resumed = resume_eps;
      break;
    case TransferMode::Full:
      next.q_net = prev.q_net;
      next.target_net = prev.target_net;
      next.opt = prev.opt;
      next.buffer = prev.buffer;
      next.buffer_push_count = prev.buffer_push_count;
      next.decision_steps = prev.decision_steps;
      next.training_steps = prev.training_steps;
      next.current_epsilon = prev.current_epsilon;
      epsilon_resumed = resume_eps;
      break;
  }

  return PhaseAgent{DdqlAgent::from_checkpoint(next), train_enabled, epsilon_resumed};
}

}  // namespace fogforge
