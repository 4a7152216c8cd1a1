#include "policyfuzz/envs/lander_lite.hpp"

#include <cmath>
#include <stdexcept>

namespace policyfuzz {

namespace {

bool out_of_viewport(const Eigen::VectorXd& s) {
  return std::abs(s[0]) > LanderLiteEnv::kViewportX || s[1] > LanderLiteEnv::kViewportTop;
}

bool touched_down(const Eigen::VectorXd& s) { return s[1] <= 0.0; }

double speed(const Eigen::VectorXd& s) { return std::hypot(s[2], s[3]); }

}  // namespace

LanderLiteEnv::LanderLiteEnv() {
  spec_.name = "landerlite";
  spec_.state_dim = 4;
  spec_.input_space = {
      {"force_x", -kForceBound, kForceBound, false},
      {"force_y", -kForceBound, kForceBound, false},
  };
  spec_.horizon = 1000;
  spec_.action_count = 4;
}

double LanderLiteEnv::pad_distance(const Eigen::VectorXd& s) {
  return std::hypot(s[0], s[1]);
}

Eigen::VectorXd LanderLiteEnv::reset(const EnvInput& input) {
  if (input.size() != 2) throw std::invalid_argument("landerlite: input must have 2 values");
  for (double v : input)
    if (v < -kForceBound || v > kForceBound)
      throw std::invalid_argument("landerlite: input out of bounds");
  state_ = Eigen::VectorXd(4);
  state_ << kSpawnX, kSpawnY, input[0] / kMass, input[1] / kMass;
  active_ = true;
  done_ = out_of_viewport(state_) || touched_down(state_);
  return state_;
}

StepResult LanderLiteEnv::step(int action) {
  if (!active_) throw std::logic_error("landerlite: step before reset");
  if (done_) throw std::logic_error("landerlite: step after done");
  if (action < 0 || action >= 4) throw std::invalid_argument("landerlite: bad action");

  double ax = 0.0, ay = -kGravity;
  if (action == 1) ay += kThrustUp;
  if (action == 2) ax -= kThrustSide;
  if (action == 3) ax += kThrustSide;

  const double before = pad_distance(state_);
  state_[2] += ax * kDt;
  state_[3] += ay * kDt;
  state_[0] += state_[2] * kDt;
  state_[1] += state_[3] * kDt;

  double reward = before - pad_distance(state_);
  if (touched_down(state_)) {
    done_ = true;
    if (speed(state_) > kSoftSpeed) {
      reward += -100.0;
    } else if (std::abs(state_[0]) <= kPadHalfWidth) {
      reward += 100.0;
    }
  } else if (out_of_viewport(state_)) {
    done_ = true;
    reward += -100.0;
  }
  return {state_, reward, done_};
}

bool LanderLiteEnv::oracle(const Trajectory& trajectory) const {
  for (const auto& s : trajectory.states) {
    if (out_of_viewport(s)) return true;
    if (touched_down(s) && speed(s) > kSoftSpeed) return true;
  }
  return false;
}

EnvInput LanderLiteEnv::sample_input(RngStream& rng) const {
  return {rng.uniform(-kForceBound, kForceBound), rng.uniform(-kForceBound, kForceBound)};
}

EnvInput LanderLiteEnv::mutate_input(const EnvInput& input, RngStream& rng) const {
  if (input.size() != 2) throw std::invalid_argument("landerlite: input must have 2 values");
  const double span = 0.05 * 2.0 * kForceBound;
  for (int attempt = 0; attempt < 100; ++attempt) {
    EnvInput mutant(2);
    for (std::size_t i = 0; i < 2; ++i) {
      double v = input[i] + rng.uniform(-span, span);
      mutant[i] = std::clamp(v, -kForceBound, kForceBound);
    }
    if (mutant != input) return mutant;
  }
  throw std::runtime_error("landerlite: mutation failed to produce a distinct input");
}

}  // namespace policyfuzz
