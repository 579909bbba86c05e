#pragma once

#include <array>
#include <cstddef>

#include "sarl/network.hpp"
#include "sarl/random.hpp"

namespace sarl {

/// Outcome of one environment step. `terminal` marks an absorbing transition
/// (goal or failure, V(s') = 0); `done` additionally covers step caps.
struct Transition {
  double reward = 0.0;
  bool terminal = false;
  bool done = false;
};

// ---------------------------------------------------------------- gridworld

/// Zero-indexed: the goal (9, 9) is the corner other write-ups call (10, 10).
/// Up decreases the row, Left decreases the column.
enum class GridAction : std::size_t { Up = 0, Down = 1, Left = 2, Right = 3 };

struct GridworldState {
  int row = 0;
  int col = 0;

  static constexpr int kSize = 10;
  std::size_t id() const { return static_cast<std::size_t>(kSize * row + col); }
  bool in_bounds() const { return row >= 0 && row < kSize && col >= 0 && col < kSize; }
  bool is_goal() const { return row == kSize - 1 && col == kSize - 1; }
  friend bool operator==(const GridworldState&, const GridworldState&) = default;
};

struct GridStep {
  GridworldState next;
  double reward = 0.0;
  bool terminal = false;
};

inline constexpr double kGridGoalReward = 10.0;
inline constexpr std::size_t kGridEpisodeCap = 1000;

/// Deterministic move; off-grid moves stay in place. Throws UsageError from the goal.
GridStep gridworld_step(GridworldState s, GridAction a);

/// Channels: 5-bit little-endian row, 5-bit little-endian column, all-ones bias.
EncodedState encode_gridworld(GridworldState s);

class Gridworld {
 public:
  static constexpr std::size_t kActionCount = 4;
  static constexpr std::size_t kStateCount = 100;
  static constexpr std::size_t kInputChannels = 3;
  static constexpr std::size_t kInputLength = 5;

  explicit Gridworld(std::size_t step_cap = kGridEpisodeCap) : step_cap_(step_cap) {}

  void reset(Rng&) { reset(); }
  void reset() { state_ = {}; steps_ = 0; done_ = false; }
  Transition step(std::size_t action);

  const GridworldState& state() const { return state_; }
  std::size_t critic_state() const { return state_.id(); }
  EncodedState encode() const { return encode_gridworld(state_); }
  std::size_t steps() const { return steps_; }

 private:
  GridworldState state_;
  std::size_t steps_ = 0;
  bool done_ = false;
  std::size_t step_cap_;
};

// ----------------------------------------------------------------- cartpole

enum class CartAction : std::size_t { Left = 0, Right = 1 };

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  std::array<double, 4> as_array() const { return {x, x_dot, theta, theta_dot}; }
  friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force = 10.0;
  double dt = 0.02;
  double x_limit = 2.4;
  double theta_limit = 0.2094;  // 12 degrees
};

struct CartStep {
  CartPoleState next;
  double reward = 0.0;
  bool failed = false;
};

/// One explicit-Euler step (positions advance with the old velocities).
/// Reward 1 unless the new state violates the cart or pole limits.
CartStep cartpole_step(const CartPoleState& s, CartAction a, const CartPoleParams& p = {});

/// Critic / encoder bounds for (x, x_dot, theta, theta_dot).
inline constexpr std::array<double, 4> kCartBounds = {2.4, 3.0, 0.21, 3.5};
inline constexpr std::size_t kCartHorizon = 200;

/// Each variable divided by its bound and clamped to [-1, 1]; 4 channels of length 1.
EncodedState encode_cartpole(const CartPoleState& s);

class CartPole {
 public:
  static constexpr std::size_t kActionCount = 2;
  static constexpr std::size_t kInputChannels = 4;
  static constexpr std::size_t kInputLength = 1;

  explicit CartPole(std::size_t horizon = kCartHorizon, CartPoleParams params = {})
      : horizon_(horizon), params_(params) {}

  /// Each variable uniform in [-0.05, 0.05].
  void reset(Rng& rng);
  void reset(const CartPoleState& s) { state_ = s; steps_ = 0; done_ = false; }
  Transition step(std::size_t action);

  const CartPoleState& state() const { return state_; }
  std::array<double, 4> critic_state() const { return state_.as_array(); }
  EncodedState encode() const { return encode_cartpole(state_); }
  std::size_t steps() const { return steps_; }

 private:
  CartPoleState state_;
  std::size_t steps_ = 0;
  bool done_ = false;
  std::size_t horizon_;
  CartPoleParams params_;
};

}  // namespace sarl
