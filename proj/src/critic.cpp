#include "sarl/critic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sarl/envs.hpp"
#include "sarl/errors.hpp"

namespace sarl {

TabularCritic::TabularCritic(std::size_t state_count, double alpha, double gamma)
    : values_(state_count, 0.0), alpha_(alpha), gamma_(gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0, 1]");
}

void TabularCritic::update(std::size_t s, double delta) { values_.at(s) += alpha_ * delta; }

TileCoder::TileCoder(std::size_t tilings, std::size_t tiles_per_dim, std::vector<double> low,
                     std::vector<double> high)
    : tilings_(tilings), tiles_per_dim_(tiles_per_dim), low_(std::move(low)), high_(std::move(high)) {
  if (tilings == 0 || tiles_per_dim == 0) throw ConfigError("tile coder needs >= 1 tiling and tile");
  if (low_.size() != high_.size() || low_.empty())
    throw ConfigError("tile coder bounds must be non-empty and of equal length");
  for (std::size_t d = 0; d < low_.size(); ++d) {
    if (!(high_[d] > low_[d])) throw ConfigError("tile coder bound " + std::to_string(d) + " is empty");
    tiles_per_tiling_ *= tiles_per_dim_ + 1;
  }
}

void TileCoder::active_features(std::span<const double> point, std::span<std::size_t> out) const {
  bool clamped = false;
  for (std::size_t t = 0; t < tilings_; ++t) {
    std::size_t index = 0;
    for (std::size_t d = 0; d < low_.size(); ++d) {
      double v = point[d];
      if (v < low_[d] || v > high_[d]) {
        v = std::clamp(v, low_[d], high_[d]);
        clamped = true;
      }
      const double scaled = (v - low_[d]) / (high_[d] - low_[d]) * static_cast<double>(tiles_per_dim_);
      // displacement (1, 3, 5, ...) in units of 1/tilings of a tile
      const double offset =
          static_cast<double>((t * (2 * d + 1)) % tilings_) / static_cast<double>(tilings_);
      auto cell = static_cast<std::size_t>(scaled + offset);
      cell = std::min(cell, tiles_per_dim_);
      index = index * (tiles_per_dim_ + 1) + cell;
    }
    out[t] = t * tiles_per_tiling_ + index;
  }
  if (clamped) ++clamped_;
}

std::vector<std::size_t> TileCoder::active_features(std::span<const double> point) const {
  std::vector<std::size_t> out(tilings_);
  active_features(point, out);
  return out;
}

TileCodedCritic::TileCodedCritic(TileCoder coder, double alpha, double gamma)
    : coder_(std::move(coder)),
      weights_(coder_.feature_count(), 0.0),
      alpha_(alpha),
      gamma_(gamma),
      scratch_(coder_.tilings()) {
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0, 1]");
}

double TileCodedCritic::value(std::span<const double> s) const {
  coder_.active_features(s, scratch_);
  double v = 0.0;
  for (auto f : scratch_) v += weights_[f];
  return v;
}

void TileCodedCritic::update(std::span<const double> s, double delta) {
  coder_.active_features(s, scratch_);
  for (auto f : scratch_) weights_[f] += alpha_ * delta;
}

TileCodedCritic make_cartpole_critic(double alpha, double gamma, std::size_t tilings,
                                     std::size_t tiles_per_dim) {
  std::vector<double> low, high;
  for (double b : kCartBounds) {
    low.push_back(-b);
    high.push_back(b);
  }
  return TileCodedCritic(TileCoder(tilings, tiles_per_dim, low, high), alpha, gamma);
}

}  // namespace sarl
