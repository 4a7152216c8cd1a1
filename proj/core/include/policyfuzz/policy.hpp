#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "policyfuzz/env.hpp"

namespace policyfuzz {

// Deterministic decision model under test: a pure function from states to
// actions. Immutable after construction and freely shareable across
// concurrent campaigns.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int act(const Eigen::VectorXd& state) const = 0;
  virtual const std::string& kind() const = 0;
  virtual const std::string& env_name() const = 0;
};

// Maps continuous (or integral) states to flat table indices via per-dimension
// bin edges; edge bins are open-ended.
class Discretizer {
 public:
  explicit Discretizer(std::vector<std::vector<double>> edges);

  int dims() const { return static_cast<int>(edges_.size()); }
  std::int64_t state_count() const { return state_count_; }
  std::int64_t index_of(const Eigen::VectorXd& state) const;
  const std::vector<std::vector<double>>& edges() const { return edges_; }

 private:
  std::vector<std::vector<double>> edges_;
  std::vector<std::int64_t> strides_;
  std::int64_t state_count_;
};

// Evenly spaced bins over the environment's input bounds for cart-pole,
// one bin per integral value for taxi. Throws for environments without a
// committed discretization.
Discretizer make_default_discretizer(const Environment& env);

struct QTableMetadata {
  std::int64_t episodes = 0;
  double mean_eval_return = 0.0;
};

// Greedy tabular policy; argmax ties break toward the lowest action index and
// unvisited states read as all-zero action values.
class QTablePolicy final : public Policy {
 public:
  QTablePolicy(std::string env_name, Discretizer discretizer, int action_count);

  int act(const Eigen::VectorXd& state) const override;
  const std::string& kind() const override { return kind_; }
  const std::string& env_name() const override { return env_name_; }

  const Discretizer& discretizer() const { return discretizer_; }
  int action_count() const { return action_count_; }
  const std::unordered_map<std::int64_t, std::vector<double>>& entries() const {
    return table_;
  }

  // Action values for a state index, created filled with `fill` on first touch.
  std::vector<double>& values_for(std::int64_t state_index, double fill = 0.0);
  const std::vector<double>* find(std::int64_t state_index) const;

  QTableMetadata metadata;

 private:
  std::string kind_ = "q_table";
  std::string env_name_;
  Discretizer discretizer_;
  int action_count_;
  std::unordered_map<std::int64_t, std::vector<double>> table_;
};

struct PdGains {
  double horizontal_lead = 0.8;  // seconds of vx lookahead
  double deadband = 0.4;         // tolerated predicted offset before side thrust
  double base_descent = 1.0;     // allowed descent speed at ground level
  double descent_slope = 0.3;    // extra allowed descent per unit height
};

// Hand-coded controller for the landing task: thrust up when descending
// faster than the height-scaled allowance, otherwise steer the predicted
// horizontal offset back toward the pad.
class PdControllerPolicy final : public Policy {
 public:
  explicit PdControllerPolicy(PdGains gains = {});

  int act(const Eigen::VectorXd& state) const override;
  const std::string& kind() const override { return kind_; }
  const std::string& env_name() const override { return env_name_; }
  const PdGains& gains() const { return gains_; }

 private:
  std::string kind_ = "pd_controller";
  std::string env_name_ = "landerlite";
  PdGains gains_;
};

struct TrainOptions {
  std::int64_t episodes = 0;
  double alpha = 0.1;
  double gamma_rl = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int eval_episodes = 100;
  std::uint64_t seed = 0;
  // Taxi only: mix plain uniform episode starts with pickup-imminent and
  // passenger-on-board starts so the sparse delivery reward can propagate
  // backward through both task stages. No effect on other environments.
  bool exploring_starts = true;
  // Initial action value for states touched during training. Tasks with
  // per-step penalties need a value near the no-progress return (for taxi,
  // -1/(1-gamma_rl)); a zero init overestimates unexplored actions so badly
  // that converged pickup values lose the argmax for the whole run.
  double q_init = 0.0;
};

// Tabular Q-learning with linearly decaying epsilon-greedy exploration.
// Deterministic given the seed.
QTablePolicy train_q_learning(Environment& env, const TrainOptions& options);

// The committed training recipes (episode counts, discounts, initial action
// values) that produce the shipped subject policies. Deliberately mediocre:
// the subjects must have faults. Throws for environments without a trainer.
TrainOptions default_train_options(const std::string& env_name);

// JSON artifact IO. load_policy accepts the alias "builtin:pd" for the
// default landing controller. The loader checks the artifact's declared
// environment, state dimensions and action count against the registry.
void save_policy(const Policy& policy, const std::string& path);
std::unique_ptr<Policy> load_policy(const std::string& path);
std::string to_json_string(const Policy& policy);
std::unique_ptr<Policy> policy_from_json_string(const std::string& text);

}  // namespace policyfuzz
