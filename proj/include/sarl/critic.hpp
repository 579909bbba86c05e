#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace sarl {

/// V(s) table over integer state ids.
class TabularCritic {
 public:
  TabularCritic(std::size_t state_count, double alpha, double gamma);

  double value(std::size_t s) const { return values_.at(s); }
  /// V(s) += alpha * delta
  void update(std::size_t s, double delta);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  std::span<const double> values() const { return values_; }
  void set_value(std::size_t s, double v) { values_.at(s) = v; }

 private:
  std::vector<double> values_;
  double alpha_;
  double gamma_;
};

/// Grid tilings over a box; each tiling is offset by an asymmetric fraction of
/// a tile per dimension and carries one extra tile per dimension so shifted
/// tilings still cover the whole box.
class TileCoder {
 public:
  TileCoder(std::size_t tilings, std::size_t tiles_per_dim, std::vector<double> low,
            std::vector<double> high);

  std::size_t tilings() const { return tilings_; }
  std::size_t dimensions() const { return low_.size(); }
  std::size_t feature_count() const { return tilings_ * tiles_per_tiling_; }

  /// One active feature index per tiling. Out-of-bounds coordinates are
  /// clamped to the box and counted in clamped_count().
  void active_features(std::span<const double> point, std::span<std::size_t> out) const;
  std::vector<std::size_t> active_features(std::span<const double> point) const;
  std::size_t clamped_count() const { return clamped_; }

 private:
  std::size_t tilings_;
  std::size_t tiles_per_dim_;
  std::size_t tiles_per_tiling_ = 1;
  std::vector<double> low_;
  std::vector<double> high_;
  mutable std::size_t clamped_ = 0;
};

/// Linear V over tile-coded binary features.
class TileCodedCritic {
 public:
  TileCodedCritic(TileCoder coder, double alpha, double gamma);

  double value(std::span<const double> s) const;
  /// w += alpha * delta * features(s)
  void update(std::span<const double> s, double delta);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  const TileCoder& coder() const { return coder_; }
  std::span<const double> weights() const { return weights_; }

 private:
  TileCoder coder_;
  std::vector<double> weights_;
  double alpha_;
  double gamma_;
  mutable std::vector<std::size_t> scratch_;
};

/// Cart-pole critic: 8 tilings x 8 tiles over the encoder bounds.
TileCodedCritic make_cartpole_critic(double alpha, double gamma, std::size_t tilings = 8,
                                     std::size_t tiles_per_dim = 8);

/// delta = r + gamma * V(s') * (1 - terminal) - V(s). V(s') is not read on
/// terminal transitions.
template <class Critic, class State>
double td_error(const Critic& critic, const State& s, double reward, const State& s_next,
                bool terminal) {
  const double next = terminal ? 0.0 : critic.value(s_next);
  return reward + critic.gamma() * next - critic.value(s);
}

/// Applies the critic's own update rule for one TD error.
template <class Critic, class State>
void critic_update(Critic& critic, const State& s, double delta) {
  critic.update(s, delta);
}

}  // namespace sarl
