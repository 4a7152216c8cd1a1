#pragma once

#include <array>
#include <cstdint>

#include "policyfuzz/env.hpp"

namespace policyfuzz {

// Grid-world pickup-and-delivery task on a fixed 18x13 map. The input is the
// tuple (taxi_row, taxi_col, passenger_row, passenger_col, destination); the
// destination indexes one of the four depot cells. The observation is
// goal-centric: (taxi_row, taxi_col, goal_row, goal_col, on_board), where the
// goal is the passenger's cell until pickup and the destination depot after.
//
// Actions: 0 north, 1 south, 2 east, 3 west, 4 pickup, 5 dropoff.
// Rewards: -1 per step (including blocked moves), -10 for an invalid pickup or
// dropoff, +20 for delivering the passenger at the destination depot (which
// ends the episode). Faults are blocked moves (collisions) and invalid
// pickup/dropoff actions.
class TaxiEnv final : public Environment {
 public:
  static constexpr int kWidth = 18;
  static constexpr int kHeight = 13;
  static constexpr int kActionNorth = 0;
  static constexpr int kActionSouth = 1;
  static constexpr int kActionEast = 2;
  static constexpr int kActionWest = 3;
  static constexpr int kActionPickup = 4;
  static constexpr int kActionDropoff = 5;

  TaxiEnv();

  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd reset(const EnvInput& input) override;
  StepResult step(int action) override;
  bool oracle(const Trajectory& trajectory) const override;
  EnvInput sample_input(RngStream& rng) const override;
  EnvInput mutate_input(const EnvInput& input, RngStream& rng) const override;

  bool is_free(int row, int col) const;
  std::pair<int, int> depot(int index) const;
  const std::vector<std::pair<int, int>>& free_cells() const { return free_cells_; }

  // The committed map: '#' wall, '.' free, 'A'-'D' depot corners.
  static const std::array<const char*, kHeight>& map_rows();

 private:
  EnvSpec spec_;
  std::vector<std::pair<int, int>> free_cells_;
  std::array<std::pair<int, int>, 4> depots_;

  // Mutable episode state.
  int taxi_row_ = 0, taxi_col_ = 0;
  int pass_row_ = 0, pass_col_ = 0;
  int dest_ = 0;
  bool in_taxi_ = false;
  bool active_ = false;
  bool done_ = true;

  Eigen::VectorXd observation() const;
};

}  // namespace policyfuzz
