#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sarl/random.hpp"

namespace sarl {

/// Binary spike train emitted by one agent within one MDP step.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  explicit SpikeTrain(std::size_t length) : bits_(length, 0) {}
  /// Throws StructuralError if any element is not 0 or 1.
  explicit SpikeTrain(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t t) const { return bits_[t]; }
  void set(std::size_t t, bool spike) { bits_[t] = spike ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t spike_count() const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Filter widths and counts of one agent. A width of 0 disables a filter.
struct AgentShape {
  std::size_t channels = 1;          // stimulus channels
  std::size_t kernel_width = 1;      // stimulus filter width per channel
  std::size_t post_spike_width = 0;  // own-history filter width
  std::size_t lateral_count = 0;     // coupled agents
  std::size_t coupling_width = 0;    // per coupled agent
  std::size_t train_length = 1;      // output bins per MDP step

  std::size_t parameter_count() const {
    return channels * kernel_width + post_spike_width + lateral_count * coupling_width + 1;
  }
  /// Stimulus length needed so that valid convolution yields train_length outputs.
  std::size_t min_stimulus_length() const { return kernel_width + train_length - 1; }

  friend bool operator==(const AgentShape&, const AgentShape&) = default;
};

/// Flat parameter vector laid out as
/// [stimulus filters (channel-major) | post-spike filter | coupling filters | bias].
/// Shared by the agent itself and by its policy gradient.
class FilterBank {
 public:
  FilterBank() = default;
  explicit FilterBank(const AgentShape& shape);

  const AgentShape& shape() const { return shape_; }

  std::span<double> stimulus_filter(std::size_t channel);
  std::span<const double> stimulus_filter(std::size_t channel) const;
  std::span<double> post_spike_filter();
  std::span<const double> post_spike_filter() const;
  std::span<double> coupling_filter(std::size_t lateral);
  std::span<const double> coupling_filter(std::size_t lateral) const;
  double& bias() { return values_.back(); }
  double bias() const { return values_.back(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 protected:
  std::size_t post_offset() const { return shape_.channels * shape_.kernel_width; }
  std::size_t coupling_offset() const { return post_offset() + shape_.post_spike_width; }

  AgentShape shape_;
  std::vector<double> values_;
};

/// GLM spiking agent: parameters theta = (stimulus k, post-spike h, coupling l, bias mu).
class GlmAgent : public FilterBank {
 public:
  GlmAgent() = default;
  /// All weights and the bias start at zero.
  explicit GlmAgent(const AgentShape& shape) : FilterBank(shape) {}

  /// Weights uniform in [-init_scale, init_scale]; bias 0.
  static GlmAgent random(const AgentShape& shape, Rng& rng, double init_scale = 0.5);

  std::size_t train_length() const { return shape_.train_length; }
};

/// d log pi / d theta, shape-congruent with the agent it was computed from.
class PolicyGradient : public FilterBank {
 public:
  PolicyGradient() = default;
  explicit PolicyGradient(const AgentShape& shape) : FilterBank(shape) {}
};

/// Non-owning view of the state an agent conditions on.
///
/// stimulus is channel-major with `channel_length` values per channel.
/// lateral holds lateral_count trains of train_length bins, row-major.
/// Only bins strictly before t of own_history and lateral are read when
/// evaluating bin t.
struct AgentInput {
  std::span<const double> stimulus;
  std::size_t channel_length = 0;
  std::span<const std::uint8_t> own_history;
  std::span<const std::uint8_t> lateral;
};

/// Throws StructuralError if `input` cannot be evaluated by `agent`.
void validate_input(const GlmAgent& agent, const AgentInput& input);

/// Pre-activation k*x + h*y + sum_i l*y_i + mu at bin t. No validation.
double pre_activation(const GlmAgent& agent, const AgentInput& input, std::size_t t);

/// Logistic function on a pre-activation clamped to +/-kPreActivationClamp,
/// kept strictly inside (0, 1) in double precision.
double safe_sigmoid(double z);
inline constexpr double kPreActivationClamp = 500.0;

/// lambda(t), the spike probability of bin t.
double conditional_intensity(const GlmAgent& agent, const AgentInput& input, std::size_t t);

/// Samples bins in order; bin t sees own_history = the bins already drawn.
/// Consumes exactly train_length draws. input.own_history is ignored.
SpikeTrain sample_spike_train(const GlmAgent& agent, const AgentInput& input, Rng& rng);

/// Sampling into a caller-owned buffer of train_length bins. The buffer is
/// used as own history while it is filled. No validation.
void sample_into(const GlmAgent& agent, const AgentInput& input,
                 std::span<std::uint8_t> out, Rng& rng);

/// log pi(train | input) = sum_spikes log lambda + sum_silent log(1 - lambda).
double log_policy_prob(const GlmAgent& agent, const AgentInput& input, const SpikeTrain& train);

/// Exact gradient of log_policy_prob for every parameter group.
PolicyGradient log_policy_grad(const GlmAgent& agent, const AgentInput& input,
                               const SpikeTrain& train);

/// Same as log_policy_grad but writes into `grad` (resized if the shape differs)
/// and reads the train from a raw bin span. No validation.
void log_policy_grad_into(const GlmAgent& agent, const AgentInput& input,
                          std::span<const std::uint8_t> train, PolicyGradient& grad);

/// Gradient from intensities recorded when `train` was sampled. Equal to
/// log_policy_grad_into as long as the agent has not changed since then.
void log_policy_grad_from_intensities(const GlmAgent& agent, const AgentInput& input,
                                      std::span<const std::uint8_t> train,
                                      std::span<const double> intensities, PolicyGradient& grad);

}  // namespace sarl
