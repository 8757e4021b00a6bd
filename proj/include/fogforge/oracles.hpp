#pragma once

#include <cstdint>
#include <string>

namespace fogforge {

// Self-checks against closed-form or hand-derivable results, shared by the
// `validate` subcommand (quick settings) and the long-form acceptance runs.
struct OracleReport {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Single cluster feeding one served node: time-averaged number in system vs
// rho/(1-rho) and mean sojourn vs 1/(mu-lambda), both within tol (relative).
OracleReport mm1_oracle(double rho, double horizon, double tol, std::uint64_t seed);

// Mean of `draws` exponential inter-arrivals within tol (relative) of beta.
OracleReport sampler_oracle(double beta, std::size_t draws, double tol, std::uint64_t seed);

// Load table: sum stays within tol of 1 across `updates` random updates, and
// each update matches the add-one-then-halve law bit for bit.
OracleReport vanishing_oracle(std::uint64_t updates, double tol, std::uint64_t seed);

// Backprop vs central finite differences on `nets` random networks;
// max relative error must stay below tol.
OracleReport gradient_oracle(std::size_t nets, double tol, std::uint64_t seed);

// Short end-to-end run checking the undiscounted inference return equals
// Q_first - Q_last with machine equality.
OracleReport telescoping_oracle(std::uint64_t seed);

}  // namespace fogforge
