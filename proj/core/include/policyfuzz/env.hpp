#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "policyfuzz/rng.hpp"

namespace policyfuzz {

// A test case: the value used to reset the environment before one execution.
// Discrete environments store integral values in the same representation.
using EnvInput = std::vector<double>;

struct InputDimension {
  std::string name;
  double lower;
  double upper;
  bool discrete;
};

struct EnvSpec {
  std::string name;
  int state_dim;
  std::vector<InputDimension> input_space;
  int horizon;  // M: maximum number of states in one trajectory
  int action_count;
};

struct StepResult {
  Eigen::VectorXd state;
  double reward;
  bool done;
};

// The record of one deterministic execution. Actions are kept alongside the
// states so that fault oracles are pure functions of the trajectory.
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<int> actions;
  double cumulative_reward = 0.0;
  bool crashed = false;

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

// Deterministic MDP under a fixed input: reset(input) fully determines all
// later behavior, there is no hidden randomness. Instances are single-owner;
// concurrent campaigns construct their own.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  // Throws std::invalid_argument for inputs outside the input space.
  virtual Eigen::VectorXd reset(const EnvInput& input) = 0;

  // Throws std::logic_error when stepping before reset or after done.
  virtual StepResult step(int action) = 0;

  // Fault oracle; depends only on the trajectory and static environment
  // configuration, never on mutable state.
  virtual bool oracle(const Trajectory& trajectory) const = 0;

  // Uniform over the input space (discrete-uniform over valid tuples).
  virtual EnvInput sample_input(RngStream& rng) const = 0;

  // Small random perturbation; the result is always valid and differs from
  // the input. Throws std::runtime_error if 100 attempts cannot produce a
  // distinct value.
  virtual EnvInput mutate_input(const EnvInput& input, RngStream& rng) const = 0;
};

// Registry used by the CLI and config files.
std::unique_ptr<Environment> make_environment(const std::string& name);
std::vector<std::string> environment_names();

}  // namespace policyfuzz
