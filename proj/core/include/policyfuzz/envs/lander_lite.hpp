#pragma once

#include "policyfuzz/env.hpp"

namespace policyfuzz {

// Two-dimensional point-mass landing task. The input is the initial force
// impulse (fx, fy) applied to the craft at spawn, so the initial velocity is
// f / mass. State: (x, y, vx, vy). Actions: 0 coast, 1 thrust up, 2 thrust
// left, 3 thrust right. Per-step reward is the decrease in distance to the
// pad center; terminal rewards are +100 for a soft landing on the pad, -100
// for a hard touchdown or for leaving the viewport. Faults are viewport exits
// and touchdowns faster than the soft-landing threshold.
class LanderLiteEnv final : public Environment {
 public:
  static constexpr double kMass = 100.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kDt = 0.02;
  static constexpr double kSpawnX = 0.0;
  static constexpr double kSpawnY = 10.0;
  static constexpr double kViewportX = 10.0;   // |x| beyond this is out
  static constexpr double kViewportTop = 12.0; // y beyond this is out
  static constexpr double kPadHalfWidth = 1.0;
  static constexpr double kSoftSpeed = 1.5;
  static constexpr double kThrustUp = 18.0;    // acceleration, gravity separate
  static constexpr double kThrustSide = 12.0;
  static constexpr double kForceBound = 1000.0;

  LanderLiteEnv();

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

  static double pad_distance(const Eigen::VectorXd& s);
};

}  // namespace policyfuzz
