#include "policyfuzz/envs/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace policyfuzz {

namespace {

const char* kDimNames[4] = {"cart_position", "cart_velocity", "pole_angle",
                            "pole_angular_velocity"};
const double kLower[4] = {-1.0, -1.0, -0.15, -1.0};
const double kUpper[4] = {1.0, 1.0, 0.15, 1.0};

bool violates(const Eigen::VectorXd& s) {
  return std::abs(s[0]) > CartPoleEnv::kPositionThreshold ||
         std::abs(s[2]) > CartPoleEnv::kAngleThreshold;
}

}  // namespace

Eigen::Vector4d cartpole_dynamics_step(const Eigen::Vector4d& state, double force) {
  const double x = state[0], x_dot = state[1], theta = state[2], theta_dot = state[3];
  const double total_mass = CartPoleEnv::kCartMass + CartPoleEnv::kPoleMass;
  const double polemass_length = CartPoleEnv::kPoleMass * CartPoleEnv::kPoleHalfLength;

  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp =
      (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (CartPoleEnv::kGravity * sin_t - cos_t * temp) /
      (CartPoleEnv::kPoleHalfLength *
       (4.0 / 3.0 - CartPoleEnv::kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

  Eigen::Vector4d next;
  next[0] = x + CartPoleEnv::kDt * x_dot;
  next[1] = x_dot + CartPoleEnv::kDt * x_acc;
  next[2] = theta + CartPoleEnv::kDt * theta_dot;
  next[3] = theta_dot + CartPoleEnv::kDt * theta_acc;
  return next;
}

CartPoleEnv::CartPoleEnv() {
  spec_.name = "cartpole";
  spec_.state_dim = 4;
  for (int i = 0; i < 4; ++i)
    spec_.input_space.push_back({kDimNames[i], kLower[i], kUpper[i], false});
  spec_.horizon = 400;
  spec_.action_count = 2;
}

Eigen::VectorXd CartPoleEnv::reset(const EnvInput& input) {
  if (input.size() != 4) throw std::invalid_argument("cartpole: input must have 4 values");
  for (int i = 0; i < 4; ++i)
    if (input[static_cast<std::size_t>(i)] < kLower[i] ||
        input[static_cast<std::size_t>(i)] > kUpper[i])
      throw std::invalid_argument("cartpole: input out of bounds");
  state_ = Eigen::Vector4d(input[0], input[1], input[2], input[3]);
  active_ = true;
  done_ = violates(state_);
  return state_;
}

StepResult CartPoleEnv::step(int action) {
  if (!active_) throw std::logic_error("cartpole: step before reset");
  if (done_) throw std::logic_error("cartpole: step after done");
  if (action != 0 && action != 1) throw std::invalid_argument("cartpole: bad action");
  const double force = action == 1 ? kForceMag : -kForceMag;
  state_ = cartpole_dynamics_step(state_, force);
  done_ = violates(state_);
  return {state_, 1.0, done_};
}

bool CartPoleEnv::oracle(const Trajectory& trajectory) const {
  for (const auto& s : trajectory.states)
    if (violates(s)) return true;
  return false;
}

EnvInput CartPoleEnv::sample_input(RngStream& rng) const {
  EnvInput input(4);
  for (int i = 0; i < 4; ++i) input[static_cast<std::size_t>(i)] = rng.uniform(kLower[i], kUpper[i]);
  return input;
}

EnvInput CartPoleEnv::mutate_input(const EnvInput& input, RngStream& rng) const {
  if (input.size() != 4) throw std::invalid_argument("cartpole: input must have 4 values");
  for (int attempt = 0; attempt < 100; ++attempt) {
    EnvInput mutant(4);
    for (int i = 0; i < 4; ++i) {
      const double span = 0.05 * (kUpper[i] - kLower[i]);
      double v = input[static_cast<std::size_t>(i)] + rng.uniform(-span, span);
      v = std::clamp(v, kLower[i], kUpper[i]);
      mutant[static_cast<std::size_t>(i)] = v;
    }
    if (mutant != input) return mutant;
  }
  throw std::runtime_error("cartpole: mutation failed to produce a distinct input");
}

}  // namespace policyfuzz
