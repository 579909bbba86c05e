#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sarl/critic.hpp"
#include "sarl/envs.hpp"
#include "sarl/random.hpp"
#include "sarl/training.hpp"

namespace sarl {

/// Softmax actor over a preference table H(state, action).
class TabularActor {
 public:
  TabularActor(std::size_t state_count, std::size_t action_count, double temperature = 1.0);

  std::size_t state_count() const { return state_count_; }
  std::size_t action_count() const { return action_count_; }
  double temperature() const { return temperature_; }

  std::span<double> preferences(std::size_t s);
  std::span<const double> preferences(std::size_t s) const;
  /// softmax(H(s, .) / temperature)
  std::vector<double> policy(std::size_t s) const;

 private:
  std::size_t state_count_;
  std::size_t action_count_;
  double temperature_;
  std::vector<double> prefs_;
};

std::size_t tabular_act(const TabularActor& actor, std::size_t s, Rng& rng);

/// H(s, .) += alpha * delta * grad_H log pi(a | s), i.e. alpha * delta * (onehot(a) - pi(s, .)) / temperature.
void tabular_update(TabularActor& actor, std::size_t s, std::size_t a, double delta, double alpha);

/// Tabular actor-critic episode on the gridworld; same loop shape as run_episode.
EpisodeResult run_tabular_episode(TabularActor& actor, TabularCritic& critic, Gridworld& env,
                                  double alpha, std::size_t max_steps, Rng& rng);

}  // namespace sarl
