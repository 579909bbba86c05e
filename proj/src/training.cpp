#include "sarl/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "sarl/errors.hpp"

namespace sarl {

void ActorConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("actor learning rate must be > 0");
  if (!(beta > 0.0)) throw ConfigError("readout temperature must be > 0");
  if (population_size == 0) throw ConfigError("population size must be >= 1");
  if (max_episode_steps == 0) throw ConfigError("max episode steps must be >= 1");
}

std::size_t agent_update(GlmAgent& agent, const PolicyGradient& grad, double delta_eff,
                         double alpha) {
  if (!(grad.shape() == agent.shape()))
    throw StructuralError("policy gradient shape does not match the agent");
  if (delta_eff == 0.0) return 0;
  const double step = alpha * delta_eff;
  double* theta = agent.values().data();
  const double* g = grad.values().data();
  const std::size_t n = agent.values().size();
  bool out_of_range = false;
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] += step * g[i];
    // NaN fails both comparisons
    out_of_range |= !(std::abs(theta[i]) <= kParameterLimit);
  }
  if (!out_of_range) return 0;

  std::size_t clamped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(theta[i]) <= kParameterLimit) continue;
    ++clamped;
    if (std::isnan(theta[i])) {
      // roll back to the pre-update value
      theta[i] = std::clamp(theta[i] - step * g[i], -kParameterLimit, kParameterLimit);
      if (std::isnan(theta[i])) theta[i] = 0.0;
    } else {
      theta[i] = std::clamp(theta[i], -kParameterLimit, kParameterLimit);
    }
  }
  if (clamped > 0)
    std::cerr << "warning: " << clamped << " agent parameter(s) clamped to +/-" << kParameterLimit
              << '\n';
  return clamped;
}

Ensemble::Ensemble(const NetworkSpec& spec, std::size_t population_size, Rng& rng,
                   double init_scale) {
  if (population_size == 0) throw ConfigError("population size must be >= 1");
  members.reserve(population_size);
  for (std::size_t m = 0; m < population_size; ++m) members.emplace_back(spec, rng, init_scale);
}

std::size_t ensemble_act(const Ensemble& ensemble, const EncodedState& state, double beta,
                         Readout readout, Rng& rng, StepRecord& record) {
  const std::size_t n = ensemble.size();
  if (n == 0) throw UsageError("ensemble is empty");
  const std::size_t actions = ensemble.members.front().action_count();

  record.traces.resize(n);
  record.distributions.resize(n);
  record.proposals.resize(n);
  record.mean_distribution.assign(actions, 0.0);

  for (std::size_t m = 0; m < n; ++m) {
    ensemble.members[m].forward(state, rng, record.traces[m]);
    auto& dist = record.distributions[m];
    dist.resize(actions);
    action_distribution(record.traces[m], beta, readout, dist);
    for (std::size_t a = 0; a < actions; ++a) record.mean_distribution[a] += dist[a];
  }
  for (auto& p : record.mean_distribution) p /= static_cast<double>(n);

  record.executed = sample_discrete(record.mean_distribution, rng);
  if (n == 1) {
    record.proposals[0] = record.executed;
  } else {
    for (std::size_t m = 0; m < n; ++m)
      record.proposals[m] = sample_discrete(record.distributions[m], rng);
  }
  return record.executed;
}

std::size_t population_update(Ensemble& ensemble, const StepRecord& record, double alpha) {
  if (record.traces.size() != ensemble.size() || record.proposals.size() != ensemble.size())
    throw StructuralError("step record does not match the ensemble size");
  std::size_t clamped = 0;
  PolicyGradient grad;
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    const double delta_eff = record.proposals[m] == record.executed ? record.delta : -record.delta;
    if (delta_eff == 0.0) continue;
    auto& net = ensemble.members[m];
    const auto& trace = record.traces[m];
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      for (std::size_t j = 0; j < net.spec().layers[l].agent_count; ++j) {
        auto& agent = net.agent(l, j);
        log_policy_grad_from_intensities(agent, trace.input(l, j), trace.train(l, j),
                                         trace.layers[l].intensity(j), grad);
        clamped += agent_update(agent, grad, delta_eff, alpha);
      }
    }
  }
  return clamped;
}

}  // namespace sarl
