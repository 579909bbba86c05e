#include "sarl/glm_agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sarl/errors.hpp"

namespace sarl {

namespace {

double clamp_preactivation(double z) {
  return std::clamp(z, -kPreActivationClamp, kPreActivationClamp);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

SpikeTrain::SpikeTrain(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw StructuralError("spike train bins must be 0 or 1");
}

std::size_t SpikeTrain::spike_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

FilterBank::FilterBank(const AgentShape& shape) : shape_(shape), values_(shape.parameter_count(), 0.0) {
  if (shape.train_length == 0) throw StructuralError("train_length must be >= 1");
  if (shape.channels > 0 && shape.kernel_width == 0)
    throw StructuralError("stimulus kernel width must be >= 1");
}

std::span<double> FilterBank::stimulus_filter(std::size_t channel) {
  return std::span<double>(values_).subspan(channel * shape_.kernel_width, shape_.kernel_width);
}
std::span<const double> FilterBank::stimulus_filter(std::size_t channel) const {
  return std::span<const double>(values_).subspan(channel * shape_.kernel_width, shape_.kernel_width);
}
std::span<double> FilterBank::post_spike_filter() {
  return std::span<double>(values_).subspan(post_offset(), shape_.post_spike_width);
}
std::span<const double> FilterBank::post_spike_filter() const {
  return std::span<const double>(values_).subspan(post_offset(), shape_.post_spike_width);
}
std::span<double> FilterBank::coupling_filter(std::size_t lateral) {
  return std::span<double>(values_).subspan(coupling_offset() + lateral * shape_.coupling_width,
                                            shape_.coupling_width);
}
std::span<const double> FilterBank::coupling_filter(std::size_t lateral) const {
  return std::span<const double>(values_).subspan(
      coupling_offset() + lateral * shape_.coupling_width, shape_.coupling_width);
}

GlmAgent GlmAgent::random(const AgentShape& shape, Rng& rng, double init_scale) {
  GlmAgent agent(shape);
  auto v = agent.values();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = uniform(rng, -init_scale, init_scale);
  agent.bias() = 0.0;
  return agent;
}

void validate_input(const GlmAgent& agent, const AgentInput& input) {
  const auto& s = agent.shape();
  if (input.stimulus.size() != s.channels * input.channel_length)
    throw StructuralError("stimulus holds " + std::to_string(input.stimulus.size()) +
                          " values, expected " + std::to_string(s.channels) + " channels x " +
                          std::to_string(input.channel_length));
  if (s.channels > 0 && input.channel_length < s.min_stimulus_length())
    throw StructuralError("stimulus channel length " + std::to_string(input.channel_length) +
                          " < kernel width + train length - 1 = " +
                          std::to_string(s.min_stimulus_length()));
  if (s.lateral_count > 0 && s.coupling_width > 0 &&
      input.lateral.size() != s.lateral_count * s.train_length)
    throw StructuralError("lateral histories hold " + std::to_string(input.lateral.size()) +
                          " bins, expected " + std::to_string(s.lateral_count) + " x " +
                          std::to_string(s.train_length));
}

double pre_activation(const GlmAgent& agent, const AgentInput& input, std::size_t t) {
  const auto& s = agent.shape();
  const double* theta = agent.values().data();
  double z = agent.bias();

  // valid convolution: bin t reads stimulus[t .. t + width)
  const double* x = input.stimulus.data() + t;
  if (s.kernel_width == 1) {
    for (std::size_t c = 0; c < s.channels; ++c) z += theta[c] * x[c * input.channel_length];
  } else {
    for (std::size_t c = 0; c < s.channels; ++c) {
      const double* k = theta + c * s.kernel_width;
      const double* xc = x + c * input.channel_length;
      for (std::size_t j = 0; j < s.kernel_width; ++j) z += k[j] * xc[j];
    }
  }

  // h[j] weights the spike j + 1 bins back
  const double* h = theta + s.channels * s.kernel_width;
  for (std::size_t j = 0; j < s.post_spike_width && j < t; ++j)
    if (input.own_history[t - 1 - j]) z += h[j];

  if (s.coupling_width > 0) {
    const double* l = h + s.post_spike_width;
    for (std::size_t i = 0; i < s.lateral_count; ++i, l += s.coupling_width) {
      const std::uint8_t* y = input.lateral.data() + i * s.train_length;
      for (std::size_t j = 0; j < s.coupling_width && j < t; ++j)
        if (y[t - 1 - j]) z += l[j];
    }
  }
  return z;
}

double safe_sigmoid(double z) {
  z = clamp_preactivation(z);
  const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::min(p, 1.0 - 0x1.0p-53);
}

double conditional_intensity(const GlmAgent& agent, const AgentInput& input, std::size_t t) {
  validate_input(agent, input);
  if (t >= agent.train_length())
    throw StructuralError("bin " + std::to_string(t) + " outside train of length " +
                          std::to_string(agent.train_length()));
  if (agent.shape().post_spike_width > 0 && input.own_history.size() < t)
    throw StructuralError("own history shorter than the evaluated bin");
  return safe_sigmoid(pre_activation(agent, input, t));
}

void sample_into(const GlmAgent& agent, const AgentInput& input, std::span<std::uint8_t> out,
                 Rng& rng) {
  AgentInput view = input;
  view.own_history = out;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double lambda = safe_sigmoid(pre_activation(agent, view, t));
    out[t] = uniform01(rng) < lambda ? 1 : 0;
  }
}

SpikeTrain sample_spike_train(const GlmAgent& agent, const AgentInput& input, Rng& rng) {
  validate_input(agent, input);
  std::vector<std::uint8_t> bits(agent.train_length(), 0);
  sample_into(agent, input, bits, rng);
  return SpikeTrain(std::move(bits));
}

double log_policy_prob(const GlmAgent& agent, const AgentInput& input, const SpikeTrain& train) {
  validate_input(agent, input);
  if (train.size() != agent.train_length())
    throw StructuralError("train length " + std::to_string(train.size()) + " != agent train length " +
                          std::to_string(agent.train_length()));
  AgentInput view = input;
  view.own_history = train.bits();
  double logp = 0.0;
  for (std::size_t t = 0; t < train.size(); ++t) {
    const double z = clamp_preactivation(pre_activation(agent, view, t));
    // log sigma(z) = -softplus(-z), log(1 - sigma(z)) = -softplus(z)
    logp -= train[t] ? softplus(-z) : softplus(z);
  }
  return logp;
}

namespace {

// Accumulates sum_t (spike_t - lambda_t) * d(pre-activation_t)/d(theta) into grad.
template <class IntensityAt>
void accumulate_grad(const AgentShape& s, const AgentInput& input,
                     std::span<const std::uint8_t> train, IntensityAt&& intensity_at,
                     PolicyGradient& grad) {
  if (!(grad.shape() == s)) grad = PolicyGradient(s);
  double* g = grad.values().data();
  std::fill(g, g + s.parameter_count(), 0.0);
  double* gh = g + s.channels * s.kernel_width;
  double* gl = gh + s.post_spike_width;
  double& gbias = g[s.parameter_count() - 1];

  for (std::size_t t = 0; t < train.size(); ++t) {
    const double err = static_cast<double>(train[t]) - intensity_at(t);
    if (err == 0.0) continue;

    const double* x = input.stimulus.data() + t;
    if (s.kernel_width == 1) {
      for (std::size_t c = 0; c < s.channels; ++c) g[c] += err * x[c * input.channel_length];
    } else {
      for (std::size_t c = 0; c < s.channels; ++c) {
        double* gk = g + c * s.kernel_width;
        const double* xc = x + c * input.channel_length;
        for (std::size_t j = 0; j < s.kernel_width; ++j) gk[j] += err * xc[j];
      }
    }
    for (std::size_t j = 0; j < s.post_spike_width && j < t; ++j)
      if (train[t - 1 - j]) gh[j] += err;
    if (s.coupling_width > 0) {
      for (std::size_t i = 0; i < s.lateral_count; ++i) {
        const std::uint8_t* y = input.lateral.data() + i * s.train_length;
        for (std::size_t j = 0; j < s.coupling_width && j < t; ++j)
          if (y[t - 1 - j]) gl[i * s.coupling_width + j] += err;
      }
    }
    gbias += err;
  }
}

}  // namespace

void log_policy_grad_into(const GlmAgent& agent, const AgentInput& input,
                          std::span<const std::uint8_t> train, PolicyGradient& grad) {
  AgentInput view = input;
  view.own_history = train;
  accumulate_grad(agent.shape(), input, train,
                  [&](std::size_t t) { return safe_sigmoid(pre_activation(agent, view, t)); }, grad);
}

void log_policy_grad_from_intensities(const GlmAgent& agent, const AgentInput& input,
                                      std::span<const std::uint8_t> train,
                                      std::span<const double> intensities, PolicyGradient& grad) {
  accumulate_grad(agent.shape(), input, train, [&](std::size_t t) { return intensities[t]; }, grad);
}

PolicyGradient log_policy_grad(const GlmAgent& agent, const AgentInput& input,
                               const SpikeTrain& train) {
  validate_input(agent, input);
  if (train.size() != agent.train_length())
    throw StructuralError("train length " + std::to_string(train.size()) + " != agent train length " +
                          std::to_string(agent.train_length()));
  PolicyGradient grad(agent.shape());
  log_policy_grad_into(agent, input, train.bits(), grad);
  return grad;
}

}  // namespace sarl
