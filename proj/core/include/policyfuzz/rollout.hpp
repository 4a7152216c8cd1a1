#pragma once

#include <cstdint>

#include "policyfuzz/env.hpp"

namespace policyfuzz {

class Policy;

// Executes one deterministic test case to the terminal condition or the
// environment horizon, applies the fault oracle and returns the full record.
Trajectory run_episode(Environment& env, const Policy& policy, const EnvInput& input);

struct ScanResult {
  std::int64_t total_inputs = 0;
  std::vector<EnvInput> fault_inputs;
};

// Ground-truth fault set: executes the full valid-tuple enumeration for taxi
// or a resolution x resolution grid over the force space for landerlite.
// Refused for cartpole, whose 4-D continuous input space has no reasonable
// enumeration.
ScanResult exhaustive_scan(Environment& env, const Policy& policy, int resolution);

}  // namespace policyfuzz
