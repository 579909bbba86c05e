#include "sarl/baselines.hpp"

#include "sarl/errors.hpp"
#include "sarl/network.hpp"

namespace sarl {

TabularActor::TabularActor(std::size_t state_count, std::size_t action_count, double temperature)
    : state_count_(state_count),
      action_count_(action_count),
      temperature_(temperature),
      prefs_(state_count * action_count, 0.0) {
  if (action_count == 0) throw ConfigError("tabular actor needs at least one action");
  if (!(temperature > 0.0)) throw ConfigError("softmax temperature must be > 0");
}

std::span<double> TabularActor::preferences(std::size_t s) {
  if (s >= state_count_) throw UsageError("state id outside the preference table");
  return std::span<double>(prefs_).subspan(s * action_count_, action_count_);
}

std::span<const double> TabularActor::preferences(std::size_t s) const {
  if (s >= state_count_) throw UsageError("state id outside the preference table");
  return std::span<const double>(prefs_).subspan(s * action_count_, action_count_);
}

std::vector<double> TabularActor::policy(std::size_t s) const {
  std::vector<double> p(action_count_);
  softmax(preferences(s), 1.0 / temperature_, p);
  return p;
}

std::size_t tabular_act(const TabularActor& actor, std::size_t s, Rng& rng) {
  return sample_discrete(actor.policy(s), rng);
}

void tabular_update(TabularActor& actor, std::size_t s, std::size_t a, double delta, double alpha) {
  if (a >= actor.action_count()) throw UsageError("action outside the preference table");
  if (delta == 0.0) return;
  const auto pi = actor.policy(s);
  auto h = actor.preferences(s);
  // d log pi(a) / d H(b) = (onehot(a)_b - pi_b) / temperature
  const double step = alpha * delta / actor.temperature();
  for (std::size_t b = 0; b < h.size(); ++b) h[b] += step * ((b == a ? 1.0 : 0.0) - pi[b]);
}

EpisodeResult run_tabular_episode(TabularActor& actor, TabularCritic& critic, Gridworld& env,
                                  double alpha, std::size_t max_steps, Rng& rng) {
  env.reset(rng);
  EpisodeResult result;
  double discount = 1.0;
  for (std::size_t tau = 0; tau < max_steps; ++tau) {
    const std::size_t s = env.critic_state();
    const std::size_t a = tabular_act(actor, s, rng);
    const Transition tr = env.step(a);
    const double delta = td_error(critic, s, tr.reward, env.critic_state(), tr.terminal);
    tabular_update(actor, s, a, delta, alpha);
    critic_update(critic, s, delta);

    result.episode_return += tr.reward;
    result.discounted_return += discount * tr.reward;
    discount *= critic.gamma();
    result.steps = tau + 1;
    if (tr.done) break;
  }
  return result;
}

}  // namespace sarl
