#include "policyfuzz/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "policyfuzz/rng.hpp"

namespace policyfuzz {

namespace {

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

void check_sequence(const CoverageModel& model,
                    const std::vector<Eigen::VectorXd>& sequence) {
  if (sequence.empty()) throw std::invalid_argument("coverage: empty sequence");
  for (const auto& s : sequence)
    if (s.size() != model.single_gmm.dim())
      throw std::invalid_argument("coverage: state dimension mismatch");
}

}  // namespace

CoverageModel make_coverage_model(int state_dim, int K, double tau, double gamma,
                                  CoverageVariant variant, UpdatePolicy update_policy,
                                  std::uint64_t rng_seed) {
  if (tau <= 0.0) throw std::invalid_argument("make_coverage_model: tau must be > 0");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("make_coverage_model: gamma outside [0, 1]");
  if (update_policy.kind == UpdatePolicy::Kind::kFirstPlusFraction &&
      (update_policy.fraction <= 0.0 || update_policy.fraction > 1.0))
    throw std::invalid_argument("make_coverage_model: fraction outside (0, 1]");
  return CoverageModel{
      gmm_init(state_dim, K, {}, stream_seed(rng_seed, "single-gmm")),
      gmm_init(2 * state_dim, K, {}, stream_seed(rng_seed, "pair-gmm")),
      tau,
      gamma,
      variant,
      update_policy,
  };
}

CoverageValue coverage(const CoverageModel& model,
                       const std::vector<Eigen::VectorXd>& sequence) {
  check_sequence(model, sequence);

  double log_d = log_density(model.single_gmm, sequence.front());
  for (std::size_t t = 0; t + 1 < sequence.size(); ++t) {
    const double log_pair =
        log_density(model.pair_gmm, concat(sequence[t], sequence[t + 1]));
    const double log_single = log_density(model.single_gmm, sequence[t]);
    double term = log_pair - log_single;
    if (model.variant == CoverageVariant::kClamped) term = std::min(0.0, term);
    log_d += term;
  }
  if (log_d < kLogCoverageFloorTrigger) log_d = kLogCoverageFloor;
  return CoverageValue{log_d};
}

bool is_low_coverage(const CoverageModel& model, CoverageValue value) {
  return value.log_d < std::log(model.tau);
}

CoverageModel update_model(const CoverageModel& model,
                           const std::vector<Eigen::VectorXd>& sequence) {
  check_sequence(model, sequence);
  if (model.gamma == 0.0) return model;

  CoverageModel next = model;

  const std::size_t pair_count = sequence.size() - 1;
  std::vector<std::size_t> pair_indices;
  std::vector<std::size_t> single_indices;
  if (model.update_policy.kind == UpdatePolicy::Kind::kFullSequence) {
    single_indices.resize(sequence.size());
    for (std::size_t i = 0; i < sequence.size(); ++i) single_indices[i] = i;
    pair_indices.resize(pair_count);
    for (std::size_t i = 0; i < pair_count; ++i) pair_indices[i] = i;
  } else {
    single_indices = {0};
    if (pair_count > 0) {
      const auto want = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(
                 static_cast<double>(pair_count) * model.update_policy.fraction)));
      for (std::size_t j = 0; j < want; ++j)
        pair_indices.push_back(j * pair_count / want);
    }
  }

  auto single_stats = SufficientStats::from_params(next.single_gmm);
  for (std::size_t i : single_indices) {
    auto result = dynem_update(next.single_gmm, single_stats, sequence[i], model.gamma);
    next.single_gmm = std::move(result.params);
    single_stats = std::move(result.stats);
  }

  auto pair_stats = SufficientStats::from_params(next.pair_gmm);
  for (std::size_t i : pair_indices) {
    auto result = dynem_update(next.pair_gmm, pair_stats,
                               concat(sequence[i], sequence[i + 1]), model.gamma);
    next.pair_gmm = std::move(result.params);
    pair_stats = std::move(result.stats);
  }
  return next;
}

namespace {

std::string variant_name(CoverageVariant v) {
  return v == CoverageVariant::kFaithful ? "faithful" : "clamped";
}

CoverageVariant variant_from_name(const std::string& name) {
  if (name == "faithful") return CoverageVariant::kFaithful;
  if (name == "clamped") return CoverageVariant::kClamped;
  throw std::invalid_argument("unknown coverage variant: " + name);
}

}  // namespace

std::string to_json_string(const CoverageModel& model) {
  nlohmann::json j;
  j["single_gmm"] = nlohmann::json::parse(to_json_string(model.single_gmm));
  j["pair_gmm"] = nlohmann::json::parse(to_json_string(model.pair_gmm));
  j["tau"] = model.tau;
  j["gamma"] = model.gamma;
  j["variant"] = variant_name(model.variant);
  if (model.update_policy.kind == UpdatePolicy::Kind::kFullSequence) {
    j["update_policy"] = "full_sequence";
  } else {
    j["update_policy"] = "first_plus_fraction";
    j["update_fraction"] = model.update_policy.fraction;
  }
  return j.dump();
}

CoverageModel coverage_model_from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  UpdatePolicy policy = UpdatePolicy::full_sequence();
  if (j.at("update_policy").get<std::string>() == "first_plus_fraction")
    policy = UpdatePolicy::first_plus_fraction(j.at("update_fraction").get<double>());
  CoverageModel model{
      gmm_from_json_string(j.at("single_gmm").dump()),
      gmm_from_json_string(j.at("pair_gmm").dump()),
      j.at("tau").get<double>(),
      j.at("gamma").get<double>(),
      variant_from_name(j.at("variant").get<std::string>()),
      policy,
  };
  if (model.pair_gmm.dim() != 2 * model.single_gmm.dim())
    throw std::invalid_argument("coverage model: pair mixture dimension mismatch");
  return model;
}

}  // namespace policyfuzz
