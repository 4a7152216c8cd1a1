#include "policyfuzz/envs/taxi.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace policyfuzz {

namespace {

// 18x13, 53 walls (~22%), four depot corners, all free cells connected.
constexpr std::array<const char*, TaxiEnv::kHeight> kMap = {
    "A...#.....#......B",
    "..#...###.....##..",
    "..#.....#.........",
    "#...#.#..#..#...##",
    "....#.#....#......",
    ".##...##.....###..",
    ".........#........",
    ".#..##..#..##.....",
    ".#....#........#..",
    "..##..#..##..#....",
    "......#..#...#....",
    ".##...#....##.....",
    "C...#......#.....D",
};

constexpr int kRowDelta[4] = {-1, 1, 0, 0};
constexpr int kColDelta[4] = {0, 0, 1, -1};

bool integral(double v) { return v == std::floor(v); }

}  // namespace

const std::array<const char*, TaxiEnv::kHeight>& TaxiEnv::map_rows() { return kMap; }

TaxiEnv::TaxiEnv() {
  spec_.name = "taxi";
  spec_.state_dim = 5;
  spec_.input_space = {
      {"taxi_row", 0, kHeight - 1, true},  {"taxi_col", 0, kWidth - 1, true},
      {"pass_row", 0, kHeight - 1, true},  {"pass_col", 0, kWidth - 1, true},
      {"destination", 0, 3, true},
  };
  spec_.horizon = 200;
  spec_.action_count = 6;

  int depot_count = 0;
  for (int r = 0; r < kHeight; ++r) {
    for (int c = 0; c < kWidth; ++c) {
      const char cell = kMap[static_cast<std::size_t>(r)][c];
      if (cell == '#') continue;
      free_cells_.emplace_back(r, c);
      if (cell >= 'A' && cell <= 'D') {
        depots_[static_cast<std::size_t>(cell - 'A')] = {r, c};
        ++depot_count;
      }
    }
  }
  if (depot_count != 4) throw std::logic_error("taxi: map must contain depots A-D");

  // Every free cell must be reachable from every other.
  std::vector<std::vector<bool>> seen(kHeight, std::vector<bool>(kWidth, false));
  std::deque<std::pair<int, int>> queue = {free_cells_.front()};
  seen[static_cast<std::size_t>(queue.front().first)][static_cast<std::size_t>(queue.front().second)] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const auto [r, c] = queue.front();
    queue.pop_front();
    for (int a = 0; a < 4; ++a) {
      const int nr = r + kRowDelta[a], nc = c + kColDelta[a];
      if (nr < 0 || nr >= kHeight || nc < 0 || nc >= kWidth) continue;
      if (!is_free(nr, nc) || seen[static_cast<std::size_t>(nr)][static_cast<std::size_t>(nc)]) continue;
      seen[static_cast<std::size_t>(nr)][static_cast<std::size_t>(nc)] = true;
      ++reached;
      queue.emplace_back(nr, nc);
    }
  }
  if (reached != free_cells_.size()) throw std::logic_error("taxi: map is not connected");
}

bool TaxiEnv::is_free(int row, int col) const {
  if (row < 0 || row >= kHeight || col < 0 || col >= kWidth) return false;
  return kMap[static_cast<std::size_t>(row)][col] != '#';
}

std::pair<int, int> TaxiEnv::depot(int index) const {
  if (index < 0 || index > 3) throw std::invalid_argument("taxi: depot index out of range");
  return depots_[static_cast<std::size_t>(index)];
}

Eigen::VectorXd TaxiEnv::observation() const {
  Eigen::VectorXd s(5);
  if (in_taxi_) {
    const auto [gr, gc] = depots_[static_cast<std::size_t>(dest_)];
    s << taxi_row_, taxi_col_, gr, gc, 1.0;
  } else {
    s << taxi_row_, taxi_col_, pass_row_, pass_col_, 0.0;
  }
  return s;
}

Eigen::VectorXd TaxiEnv::reset(const EnvInput& input) {
  if (input.size() != 5) throw std::invalid_argument("taxi: input must have 5 values");
  for (double v : input)
    if (!integral(v)) throw std::invalid_argument("taxi: input values must be integral");
  const int tr = static_cast<int>(input[0]), tc = static_cast<int>(input[1]);
  const int pr = static_cast<int>(input[2]), pc = static_cast<int>(input[3]);
  const int dest = static_cast<int>(input[4]);
  if (!is_free(tr, tc)) throw std::invalid_argument("taxi: taxi cell is a wall or out of bounds");
  if (!is_free(pr, pc)) throw std::invalid_argument("taxi: passenger cell is a wall or out of bounds");
  if (dest < 0 || dest > 3) throw std::invalid_argument("taxi: destination out of range");

  taxi_row_ = tr;
  taxi_col_ = tc;
  pass_row_ = pr;
  pass_col_ = pc;
  dest_ = dest;
  in_taxi_ = false;
  active_ = true;
  done_ = false;
  return observation();
}

StepResult TaxiEnv::step(int action) {
  if (!active_) throw std::logic_error("taxi: step before reset");
  if (done_) throw std::logic_error("taxi: step after done");
  if (action < 0 || action >= 6) throw std::invalid_argument("taxi: bad action");

  double reward = -1.0;
  if (action < 4) {
    const int nr = taxi_row_ + kRowDelta[action];
    const int nc = taxi_col_ + kColDelta[action];
    if (is_free(nr, nc)) {
      taxi_row_ = nr;
      taxi_col_ = nc;
      if (in_taxi_) {
        pass_row_ = nr;
        pass_col_ = nc;
      }
    }
    // Blocked moves leave the position unchanged; the oracle reads them from
    // the trajectory as collisions.
  } else if (action == kActionPickup) {
    if (!in_taxi_ && taxi_row_ == pass_row_ && taxi_col_ == pass_col_) {
      in_taxi_ = true;
    } else {
      reward = -10.0;
    }
  } else {  // dropoff
    const auto [dr, dc] = depots_[static_cast<std::size_t>(dest_)];
    if (in_taxi_ && taxi_row_ == dr && taxi_col_ == dc) {
      in_taxi_ = false;
      reward = 20.0;
      done_ = true;
    } else {
      reward = -10.0;
    }
  }
  return {observation(), reward, done_};
}

bool TaxiEnv::oracle(const Trajectory& trajectory) const {
  for (std::size_t t = 0; t < trajectory.actions.size(); ++t) {
    const auto& s = trajectory.states[t];
    const auto& next = trajectory.states[t + 1];
    const int action = trajectory.actions[t];
    const bool on_board = s[4] != 0.0;
    const bool at_goal = s[0] == s[2] && s[1] == s[3];
    if (action < 4) {
      if (s[0] == next[0] && s[1] == next[1]) return true;  // collision
    } else if (action == kActionPickup) {
      if (on_board || !at_goal) return true;
    } else if (action == kActionDropoff) {
      if (!on_board || !at_goal) return true;
    }
  }
  return false;
}

EnvInput TaxiEnv::sample_input(RngStream& rng) const {
  const auto pick = [&]() -> std::pair<int, int> {
    const auto idx = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(free_cells_.size()) - 1));
    return free_cells_[idx];
  };
  const auto [tr, tc] = pick();
  const auto [pr, pc] = pick();
  const auto dest = static_cast<double>(rng.uniform_int(0, 3));
  return {static_cast<double>(tr), static_cast<double>(tc),
          static_cast<double>(pr), static_cast<double>(pc), dest};
}

EnvInput TaxiEnv::mutate_input(const EnvInput& input, RngStream& rng) const {
  if (input.size() != 5) throw std::invalid_argument("taxi: input must have 5 values");
  EnvInput mutant = input;
  const auto component = rng.uniform_int(0, 2);
  if (component < 2) {
    // Move the taxi or the passenger to a uniformly chosen different free cell.
    const std::size_t base = component == 0 ? 0 : 2;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const auto idx = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(free_cells_.size()) - 1));
      const auto [r, c] = free_cells_[idx];
      if (r == static_cast<int>(input[base]) && c == static_cast<int>(input[base + 1]))
        continue;
      mutant[base] = r;
      mutant[base + 1] = c;
      return mutant;
    }
    throw std::runtime_error("taxi: mutation failed to produce a distinct input");
  }
  // New destination differs by construction.
  const auto offset = rng.uniform_int(1, 3);
  mutant[4] = static_cast<double>((static_cast<int>(input[4]) + offset) % 4);
  return mutant;
}

}  // namespace policyfuzz
