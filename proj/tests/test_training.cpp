#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sarl/critic.hpp"
#include "sarl/envs.hpp"
#include "sarl/errors.hpp"
#include "sarl/training.hpp"

namespace sarl {
namespace {

NetworkSpec small_spec() {
  NetworkSpec spec;
  spec.input_channels = 2;
  spec.input_length = 2;
  LayerSpec hidden;
  hidden.agent_count = 3;
  hidden.train_length = 2;
  hidden.kernel_width = 1;
  hidden.post_spike_width = 1;
  hidden.coupling_width = 1;
  LayerSpec out;
  out.agent_count = 2;
  out.train_length = 1;
  out.kernel_width = 2;
  spec.layers = {hidden, out};
  spec.masks = {ConnectivityMask::full(2, 3), ConnectivityMask::full(3, 2)};
  return spec;
}

const EncodedState kState{2, {1.0, 0.0, 0.5, -1.0}};

// Network whose output spikes are pinned by saturated biases.
Network pinned(const NetworkSpec& spec, std::vector<double> output_bias) {
  Network net(spec);
  for (std::size_t a = 0; a < output_bias.size(); ++a) net.agent(1, a).bias() = output_bias[a];
  return net;
}

std::vector<double> all_parameters(const Ensemble& e) {
  std::vector<double> out;
  for (const auto& net : e.members)
    for (std::size_t l = 0; l < net.layer_count(); ++l)
      for (std::size_t j = 0; j < net.spec().layers[l].agent_count; ++j) {
        const auto v = net.agent(l, j).values();
        out.insert(out.end(), v.begin(), v.end());
      }
  return out;
}

TEST(AgentUpdate, ZeroModulationLeavesAgent) {
  Rng rng(1);
  const auto s = testing::make_shape(2, 2, 1, 1, 1, 2);
  auto agent = testing::random_agent(s, rng);
  const auto before = agent;
  PolicyGradient g(s);
  for (auto& v : g.values()) v = 3.0;
  EXPECT_EQ(agent_update(agent, g, 0.0, 0.1), 0u);
  EXPECT_TRUE(std::equal(agent.values().begin(), agent.values().end(), before.values().begin()));
}

TEST(AgentUpdate, BiasStep) {
  GlmAgent agent(testing::make_shape(1, 1, 0, 0, 0, 1));
  PolicyGradient g(agent.shape());
  g.bias() = 0.5;
  agent_update(agent, g, 2.0, 0.1);
  EXPECT_NEAR(agent.bias(), 0.1, 1e-16);
}

TEST(AgentUpdate, ShapeMismatchThrows) {
  GlmAgent agent(testing::make_shape(1, 1, 0, 0, 0, 1));
  PolicyGradient g(testing::make_shape(2, 1, 0, 0, 0, 1));
  EXPECT_THROW(agent_update(agent, g, 1.0, 0.1), StructuralError);
}

TEST(AgentUpdate, NonFiniteResultIsClamped) {
  GlmAgent agent(testing::make_shape(2, 1, 0, 0, 0, 1));
  PolicyGradient g(agent.shape());
  agent.values()[0] = 1.0;
  g.values()[0] = 1e300;
  g.values()[1] = std::numeric_limits<double>::quiet_NaN();
  g.bias() = 1.0;
  EXPECT_EQ(agent_update(agent, g, 1e10, 1.0), 3u);
  EXPECT_EQ(agent.values()[0], kParameterLimit);
  EXPECT_EQ(agent.values()[1], 0.0);
  EXPECT_EQ(agent.bias(), kParameterLimit);
}

TEST(AgentUpdate, PositiveTdErrorRaisesSampledTrainProbability) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::make_shape(2, 2, 2, 1, 2, 1 + trial % 5);
    auto agent = testing::random_agent(s, rng);
    const auto in = testing::random_input(s, rng);
    const auto train = sample_spike_train(agent, in.view(), rng);
    const double before = log_policy_prob(agent, in.view(), train);
    agent_update(agent, log_policy_grad(agent, in.view(), train), 1.0, 1e-4);
    EXPECT_GT(log_policy_prob(agent, in.view(), train), before);
  }
}

TEST(Ensemble, MembersDrawnInOrder) {
  Rng a(5), b(5);
  const Ensemble e(small_spec(), 3, a, 1.0);
  ASSERT_EQ(e.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) EXPECT_TRUE(e.members[m] == Network(small_spec(), b, 1.0));
  EXPECT_THROW(Ensemble(small_spec(), 0, a), ConfigError);
}

TEST(EnsembleAct, IdenticalSaturatedMembersShareDistribution) {
  Ensemble e;
  for (int m = 0; m < 4; ++m) e.members.push_back(pinned(small_spec(), {1000.0, -1000.0}));
  Rng rng(2);
  StepRecord rec;
  ensemble_act(e, kState, 3.0, Readout::Spike, rng, rec);
  for (const auto& d : rec.distributions) EXPECT_EQ(d, rec.mean_distribution);
}

TEST(EnsembleAct, OpposedMembersGiveUniformAction) {
  Ensemble e;
  e.members.push_back(pinned(small_spec(), {1000.0, -1000.0}));
  e.members.push_back(pinned(small_spec(), {-1000.0, 1000.0}));
  Rng rng(3);
  StepRecord rec;
  std::size_t first = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    ensemble_act(e, kState, 1000.0, Readout::Spike, rng, rec);
    EXPECT_EQ(rec.distributions[0][0], 1.0);
    EXPECT_EQ(rec.distributions[1][1], 1.0);
    EXPECT_EQ(rec.proposals[0], 0u);
    EXPECT_EQ(rec.proposals[1], 1u);
    first += rec.executed == 0;
  }
  EXPECT_DOUBLE_EQ(rec.mean_distribution[0], 0.5);
  EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.015);
}

TEST(EnsembleAct, SingleMemberMatchesPlainSelection) {
  Rng init(4);
  Ensemble e(small_spec(), 1, init, 1.0);
  const Network& net = e.members[0];
  Rng a(10), b(10);
  StepRecord rec;
  for (int i = 0; i < 500; ++i) {
    const std::size_t executed = ensemble_act(e, kState, 5.0, Readout::Intensity, a, rec);
    const auto trace = net.forward(kState, b);
    const auto dist = action_distribution(trace, 5.0, Readout::Intensity);
    EXPECT_EQ(executed, sample_discrete(dist, b));
    EXPECT_EQ(rec.proposals[0], executed);
  }
  EXPECT_EQ(a, b);
}

// Fresh ensemble and one recorded step, so update tests can replay it.
struct Fixture {
  Ensemble ensemble;
  StepRecord record;

  explicit Fixture(std::size_t members, bool zero_init = false) {
    Rng rng(21);
    if (zero_init) {
      for (std::size_t m = 0; m < members; ++m) ensemble.members.emplace_back(small_spec());
    } else {
      ensemble = Ensemble(small_spec(), members, rng, 1.0);
    }
    ensemble_act(ensemble, kState, 5.0, Readout::Spike, rng, record);
  }
};

// Recomputes one member's update from its recorded trace through the
// direct gradient path and compares every parameter bit for bit.
void expect_member_update(const Network& before, const Network& after, const ForwardTrace& trace,
                          double delta_eff, double alpha) {
  for (std::size_t l = 0; l < before.layer_count(); ++l) {
    for (std::size_t j = 0; j < before.spec().layers[l].agent_count; ++j) {
      GlmAgent expected = before.agent(l, j);
      const auto t = trace.train(l, j);
      const SpikeTrain train(std::vector<std::uint8_t>(t.begin(), t.end()));
      agent_update(expected, log_policy_grad(expected, trace.input(l, j), train), delta_eff, alpha);
      const auto got = after.agent(l, j).values();
      ASSERT_TRUE(std::equal(got.begin(), got.end(), expected.values().begin()))
          << "layer " << l << " agent " << j;
    }
  }
}

TEST(PopulationUpdate, ZeroTdErrorChangesNothing) {
  Fixture f(3);
  const auto before = all_parameters(f.ensemble);
  f.record.delta = 0.0;
  population_update(f.ensemble, f.record, 0.5);
  EXPECT_EQ(all_parameters(f.ensemble), before);
}

TEST(PopulationUpdate, AgreementGivesPlainUpdates) {
  Fixture f(3);
  const Ensemble before = f.ensemble;
  for (auto& p : f.record.proposals) p = f.record.executed;
  f.record.delta = 0.7;
  population_update(f.ensemble, f.record, 0.05);
  for (std::size_t m = 0; m < 3; ++m)
    expect_member_update(before.members[m], f.ensemble.members[m], f.record.traces[m], 0.7, 0.05);
}

TEST(PopulationUpdate, DissenterLearnsFromNegatedError) {
  Fixture f(3);
  const Ensemble before = f.ensemble;
  f.record.executed = 0;
  f.record.proposals = {0, 1, 0};
  f.record.delta = 1.0;
  population_update(f.ensemble, f.record, 0.05);
  expect_member_update(before.members[0], f.ensemble.members[0], f.record.traces[0], 1.0, 0.05);
  expect_member_update(before.members[1], f.ensemble.members[1], f.record.traces[1], -1.0, 0.05);
  expect_member_update(before.members[2], f.ensemble.members[2], f.record.traces[2], 1.0, 0.05);
}

TEST(PopulationUpdate, UsesRecordedTraceOnly) {
  Fixture f(4);
  const Ensemble before = f.ensemble;
  f.record.delta = -0.3;
  population_update(f.ensemble, f.record, 0.1);
  for (std::size_t m = 0; m < 4; ++m) {
    const double d = f.record.proposals[m] == f.record.executed ? -0.3 : 0.3;
    expect_member_update(before.members[m], f.ensemble.members[m], f.record.traces[m], d, 0.1);
  }
}

TEST(PopulationUpdate, SignSymmetry) {
  // zero start so that theta + x and theta - x round identically
  Fixture plus(3, true), minus(3, true);
  plus.record.delta = 0.9;
  minus.record.delta = -0.9;
  population_update(plus.ensemble, plus.record, 0.2);
  population_update(minus.ensemble, minus.record, 0.2);
  const auto p = all_parameters(plus.ensemble);
  const auto n = all_parameters(minus.ensemble);
  ASSERT_EQ(p.size(), n.size());
  std::size_t moved = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i], -n[i]);
    moved += p[i] != 0.0;
  }
  EXPECT_GT(moved, 0u);
}

TEST(PopulationUpdate, SingleMemberIsPlainPolicyGradient) {
  Fixture f(1);
  const Ensemble before = f.ensemble;
  EXPECT_EQ(f.record.proposals[0], f.record.executed);
  f.record.delta = 0.4;
  population_update(f.ensemble, f.record, 0.02);
  expect_member_update(before.members[0], f.ensemble.members[0], f.record.traces[0], 0.4, 0.02);
}

// Stand-in environment: terminates on the first step.
struct OneStepEnv {
  void reset(Rng&) {}
  Transition step(std::size_t) { return {0.0, true, true}; }
  std::size_t critic_state() const { return 0; }
  EncodedState encode() const { return kState; }
};

// Cart-pole without force, started upright: it never falls.
struct BalancedCartPole {
  CartPole inner{kCartHorizon, CartPoleParams{.force = 0.0}};
  void reset(Rng&) { inner.reset(CartPoleState{}); }
  Transition step(std::size_t a) { return inner.step(a); }
  std::array<double, 4> critic_state() const { return inner.critic_state(); }
  EncodedState encode() const { return inner.encode(); }
};

ActorConfig actor(std::size_t population, std::size_t cap) {
  ActorConfig c;
  c.alpha = 0.05;
  c.beta = 5.0;
  c.readout = Readout::Spike;
  c.population_size = population;
  c.max_episode_steps = cap;
  return c;
}

TEST(RunEpisode, ImmediateTerminationWithZeroCritic) {
  Rng rng(1);
  Ensemble e(small_spec(), 2, rng, 1.0);
  const auto before = all_parameters(e);
  TabularCritic critic(1, 0.1, 0.99);
  OneStepEnv env;
  const auto r = run_episode(e, critic, env, actor(2, 10), rng);
  EXPECT_EQ(r.episode_return, 0.0);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_EQ(all_parameters(e), before);
  EXPECT_EQ(critic.value(0), 0.0);
}

TEST(RunEpisode, GridworldGoalPaysTen) {
  // outputs pinned to Down and Right, so every episode walks to the goal
  NetworkSpec spec;
  spec.input_channels = 3;
  spec.input_length = 5;
  LayerSpec hidden;
  hidden.agent_count = 2;
  hidden.train_length = 3;
  hidden.kernel_width = 3;
  LayerSpec out;
  out.agent_count = 4;
  out.kernel_width = 3;
  spec.layers = {hidden, out};
  spec.masks = {ConnectivityMask::full(3, 2), ConnectivityMask::full(2, 4)};
  Ensemble e;
  e.members.push_back(pinned(spec, {-1000.0, 1000.0, -1000.0, 1000.0}));
  TabularCritic critic(Gridworld::kStateCount, 0.1, 0.99);
  Gridworld env;
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const auto r = run_episode(e, critic, env, actor(1, kGridEpisodeCap), rng);
    EXPECT_EQ(r.episode_return, 10.0);
    EXPECT_GE(r.steps, 18u);
    EXPECT_TRUE(env.state().is_goal());
  }
}

TEST(RunEpisode, UnfailingCartPoleRunsFullHorizon) {
  Rng rng(2);
  const auto spec = [] {
    NetworkSpec s;
    s.input_channels = 4;
    s.input_length = 1;
    LayerSpec hidden;
    hidden.agent_count = 4;
    LayerSpec out;
    out.agent_count = 2;
    s.layers = {hidden, out};
    s.masks = {ConnectivityMask::full(4, 4), modular_mask(4, 2, 2)};
    return s;
  }();
  Ensemble e(spec, 3, rng, 1.0);
  auto critic = make_cartpole_critic(0.05, 0.99);
  BalancedCartPole env;
  const auto r = run_episode(e, critic, env, actor(3, kCartHorizon), rng);
  EXPECT_EQ(r.episode_return, 200.0);
  EXPECT_EQ(r.steps, 200u);
}

TEST(RunEpisode, SeededEpisodesAreBitReproducible) {
  auto once = [] {
    Rng rng(77);
    auto critic = make_cartpole_critic(0.05, 0.99);
    CartPole env;
    NetworkSpec spec;
    spec.input_channels = 4;
    spec.input_length = 1;
    LayerSpec hidden;
    hidden.agent_count = 6;
    LayerSpec out;
    out.agent_count = 2;
    spec.layers = {hidden, out};
    spec.masks = {ConnectivityMask::full(4, 6), modular_mask(6, 2, 2)};
    Ensemble cart(spec, 3, rng, 1.0);
    std::vector<double> trace;
    for (int ep = 0; ep < 5; ++ep) {
      const auto r = run_episode(cart, critic, env, actor(3, kCartHorizon), rng);
      trace.push_back(r.episode_return);
      trace.push_back(r.discounted_return);
    }
    auto params = all_parameters(cart);
    trace.insert(trace.end(), params.begin(), params.end());
    trace.insert(trace.end(), critic.weights().begin(), critic.weights().end());
    return trace;
  };
  EXPECT_EQ(once(), once());
}

TEST(ActorConfig, Validation) {
  ActorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ActorConfig{};
  c.population_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace sarl
