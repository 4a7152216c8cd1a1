#include "policyfuzz/rollout.hpp"

#include <stdexcept>

#include "policyfuzz/envs/lander_lite.hpp"
#include "policyfuzz/envs/taxi.hpp"
#include "policyfuzz/policy.hpp"

namespace policyfuzz {

Trajectory run_episode(Environment& env, const Policy& policy, const EnvInput& input) {
  Trajectory trajectory;
  Eigen::VectorXd state = env.reset(input);
  trajectory.states.push_back(state);
  const int horizon = env.spec().horizon;
  bool done = false;
  while (!done && static_cast<int>(trajectory.states.size()) < horizon) {
    const int action = policy.act(state);
    const StepResult result = env.step(action);
    trajectory.actions.push_back(action);
    trajectory.states.push_back(result.state);
    trajectory.cumulative_reward += result.reward;
    state = result.state;
    done = result.done;
  }
  trajectory.crashed = env.oracle(trajectory);
  return trajectory;
}

ScanResult exhaustive_scan(Environment& env, const Policy& policy, int resolution) {
  const auto& name = env.spec().name;
  ScanResult result;

  if (name == "taxi") {
    const auto& taxi = dynamic_cast<const TaxiEnv&>(env);
    const auto& cells = taxi.free_cells();
    for (const auto& [tr, tc] : cells) {
      for (const auto& [pr, pc] : cells) {
        for (int dest = 0; dest < 4; ++dest) {
          EnvInput input = {static_cast<double>(tr), static_cast<double>(tc),
                            static_cast<double>(pr), static_cast<double>(pc),
                            static_cast<double>(dest)};
          ++result.total_inputs;
          if (run_episode(env, policy, input).crashed)
            result.fault_inputs.push_back(std::move(input));
        }
      }
    }
    return result;
  }

  if (name == "landerlite") {
    if (resolution < 2) throw std::invalid_argument("exhaustive_scan: resolution must be >= 2");
    const double b = LanderLiteEnv::kForceBound;
    for (int ix = 0; ix < resolution; ++ix) {
      const double fx = -b + 2.0 * b * ix / (resolution - 1);
      for (int iy = 0; iy < resolution; ++iy) {
        const double fy = -b + 2.0 * b * iy / (resolution - 1);
        EnvInput input = {fx, fy};
        ++result.total_inputs;
        if (run_episode(env, policy, input).crashed)
          result.fault_inputs.push_back(std::move(input));
      }
    }
    return result;
  }

  throw std::invalid_argument("exhaustive_scan: refused for environment " + name);
}

}  // namespace policyfuzz
