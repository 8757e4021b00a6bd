#pragma once

#include <cstdint>
#include <string>

#include "fogforge/agent.hpp"

namespace fogforge {

// What carries over from the agent that finished the previous phase into the
// agent that starts the next one.
enum class TransferMode {
  Scratch,     // nothing: fresh weights, empty buffer, fresh optimizer
  FirstOnly,   // weights copied, then frozen: no further training
  BufferOnly,  // replay buffer copied; weights and optimizer fresh
  WeightsOnly, // weights copied; buffer emptied, optimizer reset
  Full,        // weights, buffer, optimizer and counters all carried
};

const char* transfer_mode_name(TransferMode m);
TransferMode transfer_mode_from_name(const std::string& s);

struct PhaseAgent {
  DdqlAgent agent;
  bool train_enabled;    // false only for FirstOnly
  // When set, exploration stays at the schedule floor for the whole phase
  // instead of re-running the decay (weight-carrying modes resume; fresh
  // weights restart).
  bool epsilon_resumed;
};

// Builds the next phase's agent from the previous phase's checkpoint. Pure:
// the checkpoint is untouched, so callers can fan several modes out of one
// snapshot. fresh_seed feeds whatever the mode re-initializes (weights and/or
// the per-phase exploration and sampling streams).
PhaseAgent initialize_phase_agent(TransferMode mode, const Checkpoint& prev,
                                  std::uint64_t fresh_seed);

// Whether the mode discards the learned weights at a phase boundary; the
// harness resets the rolling load table alongside them.
bool resets_weights(TransferMode mode);

}  // namespace fogforge
