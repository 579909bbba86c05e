#include "sarl/envs.hpp"

#include <algorithm>
#include <cmath>

#include "sarl/errors.hpp"

namespace sarl {

GridStep gridworld_step(GridworldState s, GridAction a) {
  if (!s.in_bounds()) throw UsageError("gridworld state out of bounds");
  if (s.is_goal()) throw UsageError("cannot step from the terminal gridworld state");
  GridworldState n = s;
  switch (a) {
    case GridAction::Up: n.row -= 1; break;
    case GridAction::Down: n.row += 1; break;
    case GridAction::Left: n.col -= 1; break;
    case GridAction::Right: n.col += 1; break;
  }
  if (!n.in_bounds()) n = s;
  const bool goal = n.is_goal();
  return {n, goal ? kGridGoalReward : 0.0, goal};
}

EncodedState encode_gridworld(GridworldState s) {
  EncodedState e;
  e.channel_length = Gridworld::kInputLength;
  e.values.assign(Gridworld::kInputChannels * Gridworld::kInputLength, 0.0);
  for (std::size_t b = 0; b < Gridworld::kInputLength; ++b) {
    e.values[b] = (s.row >> b) & 1;
    e.values[Gridworld::kInputLength + b] = (s.col >> b) & 1;
    e.values[2 * Gridworld::kInputLength + b] = 1.0;
  }
  return e;
}

Transition Gridworld::step(std::size_t action) {
  if (action >= kActionCount) throw UsageError("gridworld action out of range");
  if (done_) throw UsageError("gridworld episode is over; call reset()");
  const auto r = gridworld_step(state_, static_cast<GridAction>(action));
  state_ = r.next;
  ++steps_;
  done_ = r.terminal || steps_ >= step_cap_;
  return {r.reward, r.terminal, done_};
}

CartStep cartpole_step(const CartPoleState& s, CartAction a, const CartPoleParams& p) {
  const double force = a == CartAction::Right ? p.force : -p.force;
  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_mass_length = p.pole_mass * p.half_length;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);

  const double temp = (force + pole_mass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
  const double theta_acc = (p.gravity * sin_t - cos_t * temp) /
                           (p.half_length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  CartStep out;
  out.next.x = s.x + p.dt * s.x_dot;
  out.next.x_dot = s.x_dot + p.dt * x_acc;
  out.next.theta = s.theta + p.dt * s.theta_dot;
  out.next.theta_dot = s.theta_dot + p.dt * theta_acc;
  out.failed = std::abs(out.next.x) > p.x_limit || std::abs(out.next.theta) > p.theta_limit;
  out.reward = out.failed ? 0.0 : 1.0;
  return out;
}

EncodedState encode_cartpole(const CartPoleState& s) {
  const auto v = s.as_array();
  EncodedState e;
  e.channel_length = 1;
  e.values.resize(4);
  for (std::size_t i = 0; i < 4; ++i) e.values[i] = std::clamp(v[i] / kCartBounds[i], -1.0, 1.0);
  return e;
}

void CartPole::reset(Rng& rng) {
  state_.x = uniform(rng, -0.05, 0.05);
  state_.x_dot = uniform(rng, -0.05, 0.05);
  state_.theta = uniform(rng, -0.05, 0.05);
  state_.theta_dot = uniform(rng, -0.05, 0.05);
  steps_ = 0;
  done_ = false;
}

Transition CartPole::step(std::size_t action) {
  if (action >= kActionCount) throw UsageError("cartpole action out of range");
  if (done_) throw UsageError("cartpole episode is over; call reset()");
  const auto r = cartpole_step(state_, static_cast<CartAction>(action), params_);
  state_ = r.next;
  ++steps_;
  done_ = r.failed || steps_ >= horizon_;
  return {r.reward, r.failed, done_};
}

}  // namespace sarl
