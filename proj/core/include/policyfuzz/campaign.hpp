#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "policyfuzz/coverage.hpp"

namespace policyfuzz {

enum class Method { kMdpFuzz, kFuzzer, kRandom };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

// A fully seeded experiment description; identical configs reproduce byte-
// identical campaign outputs.
struct CampaignConfig {
  std::string env;
  std::string policy;  // artifact path, or "builtin:pd" for the landing controller
  Method method = Method::kMdpFuzz;
  std::int64_t budget = 5000;        // B: total test executions
  std::int64_t init_samples = 1000;  // N: sampling-phase inputs (fuzz methods)
  int gmm_components = 10;           // K
  double tau = 0.01;
  double gamma = 0.01;
  CoverageVariant variant = CoverageVariant::kFaithful;
  UpdatePolicy update_policy = UpdatePolicy::full_sequence();
  std::uint64_t seed = 0;
  // Whether sampling-phase crashes count toward the reported curve; the fault
  // log always records them either way.
  bool count_sampling_faults = true;
};

// Throws std::invalid_argument on violations (unknown env/method, missing
// fields, or a budget smaller than the 3N initialization cost).
void validate(const CampaignConfig& config);

std::string to_json_string(const CampaignConfig& config);
CampaignConfig campaign_config_from_json_string(const std::string& text);

// Grid of mdpfuzz parameters crossed with seeds; grids left empty in the spec
// file fall back to the base configuration's single value.
struct SweepSpec {
  CampaignConfig base;
  std::vector<int> k_grid;
  std::vector<double> tau_grid;
  std::vector<double> gamma_grid;
  std::vector<std::uint64_t> seeds;
};

void validate(const SweepSpec& spec);
std::string to_json_string(const SweepSpec& spec);
SweepSpec sweep_spec_from_json_string(const std::string& text);

// Wall-clock decomposition of one campaign. testing covers environment and
// policy interaction, coverage the mixture evaluations and updates; other
// absorbs the remainder, so total >= testing + coverage always holds.
struct Timings {
  double total_s = 0.0;
  double testing_s = 0.0;
  double coverage_s = 0.0;
  double other_s = 0.0;
};

}  // namespace policyfuzz
