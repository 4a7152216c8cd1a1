#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "policyfuzz/gmm.hpp"

namespace policyfuzz {

// Sequence log-densities below the trigger are stored as the distinguished
// floor so that comparisons against any representable threshold stay total.
inline constexpr double kLogCoverageFloorTrigger = -745.0;
inline constexpr double kLogCoverageFloor = -746.0;

// faithful: d = p(s0) * prod p(s_t, s_t+1) / p(s_t)
// clamped:  every ratio factor capped at 1 before entering the product
enum class CoverageVariant { kFaithful, kClamped };

struct UpdatePolicy {
  enum class Kind { kFullSequence, kFirstPlusFraction };
  Kind kind = Kind::kFullSequence;
  double fraction = 0.1;  // share of pairs fed to the pair mixture, in (0, 1]

  static UpdatePolicy full_sequence() { return {Kind::kFullSequence, 1.0}; }
  static UpdatePolicy first_plus_fraction(double f) {
    return {Kind::kFirstPlusFraction, f};
  }
};

struct CoverageValue {
  double log_d;
};

// The pair of mixtures behind the sequence likelihood: one over single states
// (dim d) and one over concatenated consecutive states (dim 2d).
struct CoverageModel {
  GmmParams single_gmm;
  GmmParams pair_gmm;
  double tau;
  double gamma;
  CoverageVariant variant = CoverageVariant::kFaithful;
  UpdatePolicy update_policy;
};

// Fresh model with randomly seeded mixtures (no observations yet).
CoverageModel make_coverage_model(int state_dim, int K, double tau, double gamma,
                                  CoverageVariant variant, UpdatePolicy update_policy,
                                  std::uint64_t rng_seed);

// Sequence log-likelihood per the configured variant. Pure function.
CoverageValue coverage(const CoverageModel& model,
                       const std::vector<Eigen::VectorXd>& sequence);

// exp(log_d) < tau, evaluated in log space.
bool is_low_coverage(const CoverageModel& model, CoverageValue value);

// Returns a model whose mixtures absorbed the sequence per the update policy.
// tau, gamma, variant and update_policy are never altered.
CoverageModel update_model(const CoverageModel& model,
                           const std::vector<Eigen::VectorXd>& sequence);

std::string to_json_string(const CoverageModel& model);
CoverageModel coverage_model_from_json_string(const std::string& text);

}  // namespace policyfuzz
