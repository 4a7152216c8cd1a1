#pragma once

#include "policyfuzz/env.hpp"

namespace policyfuzz {

// Inverted pendulum on a cart, Euler-integrated at a fixed time step.
// State: (cart position, cart velocity, pole angle, pole angular velocity).
// Actions: 0 pushes left, 1 pushes right. Reward is +1 per step. An episode
// ends when the pole tips past the angle threshold or the cart leaves the
// track, which is exactly the fault condition.
class CartPoleEnv final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kPoleHalfLength = 0.5;
  static constexpr double kForceMag = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kAngleThreshold = 0.20943951023931953;  // 12 degrees
  static constexpr double kPositionThreshold = 2.4;

  CartPoleEnv();

  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd reset(const EnvInput& input) override;
  StepResult step(int action) override;
  bool oracle(const Trajectory& trajectory) const override;
  EnvInput sample_input(RngStream& rng) const override;
  EnvInput mutate_input(const EnvInput& input, RngStream& rng) const override;

 private:
  EnvSpec spec_;
  Eigen::VectorXd state_;
  bool active_ = false;
  bool done_ = true;
};

// One Euler step of the cart-pole dynamics under an arbitrary horizontal
// force; exposed for direct testing of the physics.
Eigen::Vector4d cartpole_dynamics_step(const Eigen::Vector4d& state, double force);

}  // namespace policyfuzz
