#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sarl/glm_agent.hpp"
#include "sarl/random.hpp"

namespace sarl {

struct LayerSpec {
  std::size_t agent_count = 1;
  std::size_t train_length = 1;
  std::size_t kernel_width = 1;
  std::size_t post_spike_width = 0;
  std::size_t coupling_width = 0;  // couples every pair of agents within the layer
};

/// Boolean upstream x downstream matrix; (i, j) set iff upstream i feeds downstream j.
class ConnectivityMask {
 public:
  ConnectivityMask() = default;
  ConnectivityMask(std::size_t upstream, std::size_t downstream, bool value = true);

  static ConnectivityMask full(std::size_t upstream, std::size_t downstream) {
    return ConnectivityMask(upstream, downstream, true);
  }

  std::size_t upstream() const { return upstream_; }
  std::size_t downstream() const { return downstream_; }
  bool operator()(std::size_t i, std::size_t j) const { return bits_[i * downstream_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool value) { bits_[i * downstream_ + j] = value ? 1 : 0; }

  /// Upstream indices feeding downstream agent j, ascending.
  std::vector<std::size_t> sources(std::size_t j) const;
  bool is_full() const;
  /// Throws ConfigError if some downstream agent has no upstream connection.
  void validate() const;

  friend bool operator==(const ConnectivityMask&, const ConnectivityMask&) = default;

 private:
  std::size_t upstream_ = 0;
  std::size_t downstream_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Block-diagonal mask over `modules` contiguous groups of each layer; the last
/// group absorbs any remainder. Group g upstream feeds only group g downstream.
ConnectivityMask modular_mask(std::size_t upstream, std::size_t downstream, std::size_t modules);

/// Per-channel stimulus, channel-major.
struct EncodedState {
  std::size_t channel_length = 0;
  std::vector<double> values;

  std::size_t channels() const { return channel_length == 0 ? 0 : values.size() / channel_length; }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(values).subspan(c * channel_length, channel_length);
  }
  friend bool operator==(const EncodedState&, const EncodedState&) = default;
};

struct NetworkSpec {
  std::size_t input_channels = 1;
  std::size_t input_length = 1;
  std::vector<LayerSpec> layers;
  /// masks[l] connects layer l-1 (or the input channels when l == 0) to layer l.
  std::vector<ConnectivityMask> masks;

  /// Throws ConfigError / StructuralError on inconsistent sizes.
  void validate() const;
  std::size_t action_count() const { return layers.empty() ? 0 : layers.back().agent_count; }
};

/// Sampled activity of one layer for one MDP step. Everything an agent's
/// gradient needs is kept here: its gathered stimulus, its train, and the
/// trains of its coupled agents.
struct LayerTrace {
  std::size_t agent_count = 0;
  std::size_t train_length = 0;
  std::size_t channel_length = 0;
  std::vector<std::uint8_t> trains;       // agent-major, agent_count x train_length
  std::vector<double> trains_real;        // same bins widened to double
  std::vector<double> intensities;        // lambda per agent and bin
  std::vector<double> stimulus;           // gathered per agent
  std::vector<std::size_t> stimulus_offset;
  std::vector<std::uint8_t> lateral;      // per agent, (agent_count - 1) x train_length; empty without coupling

  std::span<const std::uint8_t> train(std::size_t j) const {
    return std::span<const std::uint8_t>(trains).subspan(j * train_length, train_length);
  }
  std::span<const double> intensity(std::size_t j) const {
    return std::span<const double>(intensities).subspan(j * train_length, train_length);
  }
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;

  /// lambda of each output agent (one bin each).
  std::span<const double> output_intensities() const { return layers.back().intensities; }
  /// View of the state agent j of layer l conditioned on, with its own train as history.
  AgentInput input(std::size_t layer, std::size_t j) const;
  std::span<const std::uint8_t> train(std::size_t layer, std::size_t j) const {
    return layers[layer].train(j);
  }
};

class Network {
 public:
  Network() = default;
  /// All agents zero-initialised.
  explicit Network(NetworkSpec spec);
  /// Agents drawn with GlmAgent::random, layer by layer, agent by agent.
  Network(NetworkSpec spec, Rng& rng, double init_scale = 0.5);

  const NetworkSpec& spec() const { return spec_; }
  std::size_t layer_count() const { return agents_.size(); }
  std::size_t action_count() const { return spec_.action_count(); }

  GlmAgent& agent(std::size_t layer, std::size_t j) { return agents_[layer][j]; }
  const GlmAgent& agent(std::size_t layer, std::size_t j) const { return agents_[layer][j]; }
  const std::vector<std::size_t>& sources(std::size_t layer, std::size_t j) const {
    return sources_[layer][j];
  }

  /// Samples every layer in feed-forward order. Within a layer, bins advance in
  /// lockstep so coupled agents see each other's earlier bins; agent j of a
  /// layer draws before agent j + 1 at each bin.
  void forward(const EncodedState& state, Rng& rng, ForwardTrace& trace) const;
  ForwardTrace forward(const EncodedState& state, Rng& rng) const;

  friend bool operator==(const Network& a, const Network& b);

 private:
  void build(Rng* rng, double init_scale);

  NetworkSpec spec_;
  std::vector<std::vector<GlmAgent>> agents_;
  std::vector<std::vector<std::vector<std::size_t>>> sources_;
};

/// What the softmax readout reads from the output layer: the intensities
/// lambda_a, or the sampled output spikes.
enum class Readout { Intensity, Spike };

/// softmax(beta * values) written into `out`.
void softmax(std::span<const double> values, double beta, std::span<double> out);

/// Softmax readout over the output layer, softmax(beta * lambda) by default.
std::vector<double> action_distribution(const ForwardTrace& trace, double beta,
                                        Readout readout = Readout::Intensity);
/// Same, written into `out`.
void action_distribution(const ForwardTrace& trace, double beta, Readout readout,
                         std::span<double> out);

}  // namespace sarl
