#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sarl/critic.hpp"
#include "sarl/glm_agent.hpp"
#include "sarl/network.hpp"
#include "sarl/random.hpp"

namespace sarl {

/// Only the sign-flip reading of the agreement rule is implemented: members
/// whose proposal matches the executed action learn from +delta, others from -delta.
enum class AgreementRule { SignFlip };

struct ActorConfig {
  double alpha = 0.01;             // actor learning rate
  double beta = 5.0;               // softmax readout temperature
  Readout readout = Readout::Intensity;
  std::size_t population_size = 1;
  std::size_t max_episode_steps = 1000;
  std::size_t episode_count = 1;
  AgreementRule agreement = AgreementRule::SignFlip;

  /// Throws ConfigError.
  void validate() const;
};

/// Parameters are clamped to this magnitude after an update that leaves them
/// non-finite or larger.
inline constexpr double kParameterLimit = 1e6;

/// theta += alpha * delta_eff * grad over every parameter group. Returns the
/// number of parameters that had to be clamped (0 normally).
std::size_t agent_update(GlmAgent& agent, const PolicyGradient& grad, double delta_eff,
                         double alpha);

struct Ensemble {
  std::vector<Network> members;

  Ensemble() = default;
  /// population_size networks of the same topology, drawn in member order from `rng`.
  Ensemble(const NetworkSpec& spec, std::size_t population_size, Rng& rng,
           double init_scale = 0.5);

  std::size_t size() const { return members.size(); }
};

struct StepRecord {
  std::size_t tau = 0;
  std::vector<ForwardTrace> traces;
  std::vector<std::vector<double>> distributions;
  std::vector<double> mean_distribution;
  std::vector<std::size_t> proposals;
  std::size_t executed = 0;
  double reward = 0.0;
  double delta = 0.0;
};

/// Runs every member forward (member order), averages their softmax
/// distributions, samples the executed action from the mean, then samples each
/// member's proposal from its own distribution. With a single member the
/// proposal is the executed action itself. Fills `record` and returns the
/// executed action.
std::size_t ensemble_act(const Ensemble& ensemble, const EncodedState& state, double beta,
                         Readout readout, Rng& rng, StepRecord& record);

/// Agreement-signed update of every agent of every member from its own trace.
/// Returns the number of clamped parameters.
std::size_t population_update(Ensemble& ensemble, const StepRecord& record, double alpha);

struct EpisodeResult {
  double episode_return = 0.0;
  std::size_t steps = 0;
  double discounted_return = 0.0;
  std::size_t clamped_parameters = 0;
};

/// One on-line actor-critic episode:
/// encode -> ensemble_act -> env.step -> td_error -> population_update -> critic update.
template <class Env, class Critic>
EpisodeResult run_episode(Ensemble& ensemble, Critic& critic, Env& env, const ActorConfig& config,
                          Rng& rng, StepRecord& record) {
  env.reset(rng);
  EpisodeResult result;
  double discount = 1.0;
  for (std::size_t tau = 0; tau < config.max_episode_steps; ++tau) {
    const auto state = env.critic_state();
    record.tau = tau;
    const std::size_t action = ensemble_act(ensemble, env.encode(), config.beta, config.readout, rng, record);
    const auto tr = env.step(action);
    const double delta = td_error(critic, state, tr.reward, env.critic_state(), tr.terminal);
    record.reward = tr.reward;
    record.delta = delta;
    result.clamped_parameters += population_update(ensemble, record, config.alpha);
    critic_update(critic, state, delta);

    result.episode_return += tr.reward;
    result.discounted_return += discount * tr.reward;
    discount *= critic.gamma();
    result.steps = tau + 1;
    if (tr.done) break;
  }
  return result;
}

template <class Env, class Critic>
EpisodeResult run_episode(Ensemble& ensemble, Critic& critic, Env& env, const ActorConfig& config,
                          Rng& rng) {
  StepRecord record;
  return run_episode(ensemble, critic, env, config, rng, record);
}

}  // namespace sarl
