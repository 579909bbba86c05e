#include "sarl/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sarl/errors.hpp"

namespace sarl {

ConnectivityMask::ConnectivityMask(std::size_t upstream, std::size_t downstream, bool value)
    : upstream_(upstream), downstream_(downstream), bits_(upstream * downstream, value ? 1 : 0) {}

std::vector<std::size_t> ConnectivityMask::sources(std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < upstream_; ++i)
    if ((*this)(i, j)) out.push_back(i);
  return out;
}

bool ConnectivityMask::is_full() const {
  return std::all_of(bits_.begin(), bits_.end(), [](auto b) { return b != 0; });
}

void ConnectivityMask::validate() const {
  for (std::size_t j = 0; j < downstream_; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < upstream_ && !any; ++i) any = (*this)(i, j);
    if (!any)
      throw ConfigError("downstream agent " + std::to_string(j) + " has no upstream connection");
  }
}

ConnectivityMask modular_mask(std::size_t upstream, std::size_t downstream, std::size_t modules) {
  if (modules == 0) throw ConfigError("module count must be >= 1");
  if (modules > std::min(upstream, downstream))
    throw ConfigError("module count " + std::to_string(modules) + " exceeds min(upstream=" +
                      std::to_string(upstream) + ", downstream=" + std::to_string(downstream) + ")");
  const auto group_of = [modules](std::size_t idx, std::size_t n) {
    return std::min(idx / (n / modules), modules - 1);
  };
  ConnectivityMask mask(upstream, downstream, false);
  for (std::size_t i = 0; i < upstream; ++i)
    for (std::size_t j = 0; j < downstream; ++j)
      mask.set(i, j, group_of(i, upstream) == group_of(j, downstream));
  return mask;
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw ConfigError("network needs at least one layer");
  if (masks.size() != layers.size())
    throw ConfigError("expected one mask per layer, got " + std::to_string(masks.size()) + " for " +
                      std::to_string(layers.size()) + " layers");
  if (layers.back().train_length != 1)
    throw ConfigError("output layer must use single-spike readout (train_length 1)");
  std::size_t up_count = input_channels;
  std::size_t up_length = input_length;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& spec = layers[l];
    if (spec.agent_count == 0 || spec.train_length == 0 || spec.kernel_width == 0)
      throw ConfigError("layer " + std::to_string(l) + ": counts and widths must be >= 1");
    if (spec.kernel_width + spec.train_length - 1 > up_length)
      throw StructuralError("layer " + std::to_string(l) + ": kernel width " +
                            std::to_string(spec.kernel_width) + " and train length " +
                            std::to_string(spec.train_length) + " need upstream length >= " +
                            std::to_string(spec.kernel_width + spec.train_length - 1) + ", got " +
                            std::to_string(up_length));
    if (masks[l].upstream() != up_count || masks[l].downstream() != spec.agent_count)
      throw StructuralError("mask " + std::to_string(l) + " is " +
                            std::to_string(masks[l].upstream()) + "x" +
                            std::to_string(masks[l].downstream()) + ", expected " +
                            std::to_string(up_count) + "x" + std::to_string(spec.agent_count));
    masks[l].validate();
    up_count = spec.agent_count;
    up_length = spec.train_length;
  }
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) { build(nullptr, 0.0); }

Network::Network(NetworkSpec spec, Rng& rng, double init_scale) : spec_(std::move(spec)) {
  build(&rng, init_scale);
}

void Network::build(Rng* rng, double init_scale) {
  spec_.validate();
  agents_.resize(spec_.layers.size());
  sources_.resize(spec_.layers.size());
  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    const auto& ls = spec_.layers[l];
    agents_[l].clear();
    sources_[l].clear();
    for (std::size_t j = 0; j < ls.agent_count; ++j) {
      sources_[l].push_back(spec_.masks[l].sources(j));
      AgentShape shape;
      shape.channels = sources_[l][j].size();
      shape.kernel_width = ls.kernel_width;
      shape.post_spike_width = ls.post_spike_width;
      shape.lateral_count = ls.coupling_width > 0 ? ls.agent_count - 1 : 0;
      shape.coupling_width = ls.coupling_width;
      shape.train_length = ls.train_length;
      agents_[l].push_back(rng ? GlmAgent::random(shape, *rng, init_scale) : GlmAgent(shape));
    }
  }
}

bool operator==(const Network& a, const Network& b) {
  if (a.agents_.size() != b.agents_.size()) return false;
  for (std::size_t l = 0; l < a.agents_.size(); ++l) {
    if (a.agents_[l].size() != b.agents_[l].size()) return false;
    for (std::size_t j = 0; j < a.agents_[l].size(); ++j) {
      const auto va = a.agents_[l][j].values();
      const auto vb = b.agents_[l][j].values();
      if (!std::equal(va.begin(), va.end(), vb.begin(), vb.end())) return false;
    }
  }
  return true;
}

AgentInput ForwardTrace::input(std::size_t layer, std::size_t j) const {
  const auto& lt = layers[layer];
  const std::size_t begin = lt.stimulus_offset[j];
  const std::size_t end = lt.stimulus_offset[j + 1];
  AgentInput in;
  in.stimulus = std::span<const double>(lt.stimulus).subspan(begin, end - begin);
  in.channel_length = lt.channel_length;
  in.own_history = lt.train(j);
  if (!lt.lateral.empty()) {
    const std::size_t per_agent = (lt.agent_count - 1) * lt.train_length;
    in.lateral = std::span<const std::uint8_t>(lt.lateral).subspan(j * per_agent, per_agent);
  }
  return in;
}

void Network::forward(const EncodedState& state, Rng& rng, ForwardTrace& trace) const {
  if (state.channel_length != spec_.input_length || state.channels() != spec_.input_channels ||
      state.values.size() != spec_.input_channels * spec_.input_length)
    throw StructuralError("encoded state is " + std::to_string(state.channels()) + " x " +
                          std::to_string(state.channel_length) + ", network expects " +
                          std::to_string(spec_.input_channels) + " x " +
                          std::to_string(spec_.input_length));

  trace.layers.resize(agents_.size());
  std::span<const double> upstream_values = state.values;
  std::size_t upstream_length = spec_.input_length;

  for (std::size_t l = 0; l < agents_.size(); ++l) {
    const auto& ls = spec_.layers[l];
    auto& lt = trace.layers[l];
    const std::size_t n = ls.agent_count;
    const std::size_t k = ls.train_length;
    lt.agent_count = n;
    lt.train_length = k;
    lt.channel_length = upstream_length;
    lt.trains.assign(n * k, 0);
    lt.intensities.assign(n * k, 0.0);

    lt.stimulus_offset.resize(n + 1);
    std::size_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      lt.stimulus_offset[j] = total;
      total += sources_[l][j].size() * upstream_length;
    }
    lt.stimulus_offset[n] = total;
    lt.stimulus.resize(total);
    double* dst = lt.stimulus.data();
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t src : sources_[l][j]) {
        const double* ch = upstream_values.data() + src * upstream_length;
        dst = std::copy(ch, ch + upstream_length, dst);
      }
    }

    const bool coupled = ls.coupling_width > 0 && n > 1;
    const std::size_t lateral_per_agent = coupled ? (n - 1) * k : 0;
    lt.lateral.assign(n * lateral_per_agent, 0);

    for (std::size_t t = 0; t < k; ++t) {
      if (coupled && t > 0) {
        // publish bin t-1 of every agent to the lateral views of the others
        for (std::size_t j = 0; j < n; ++j) {
          std::uint8_t* dst = lt.lateral.data() + j * lateral_per_agent;
          for (std::size_t i = 0, slot = 0; i < n; ++i) {
            if (i == j) continue;
            dst[slot * k + t - 1] = lt.trains[i * k + t - 1];
            ++slot;
          }
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        const AgentInput in = trace.input(l, j);
        const double lambda = safe_sigmoid(pre_activation(agents_[l][j], in, t));
        lt.intensities[j * k + t] = lambda;
        lt.trains[j * k + t] = uniform01(rng) < lambda ? 1 : 0;
      }
    }
    if (coupled) {
      // complete the lateral snapshot so it holds every coupled train in full
      for (std::size_t j = 0; j < n; ++j) {
        std::uint8_t* dst = lt.lateral.data() + j * lateral_per_agent;
        for (std::size_t i = 0, slot = 0; i < n; ++i) {
          if (i == j) continue;
          dst[slot * k + k - 1] = lt.trains[i * k + k - 1];
          ++slot;
        }
      }
    }

    // the next layer reads these trains as real-valued stimulus
    lt.trains_real.assign(lt.trains.begin(), lt.trains.end());
    upstream_values = lt.trains_real;
    upstream_length = k;
  }
}

ForwardTrace Network::forward(const EncodedState& state, Rng& rng) const {
  ForwardTrace trace;
  forward(state, rng, trace);
  return trace;
}

void softmax(std::span<const double> values, double beta, std::span<double> out) {
  double top = values.empty() ? 0.0 : beta * values[0];
  for (double v : values) top = std::max(top, beta * v);
  double total = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    out[a] = std::exp(beta * values[a] - top);
    total += out[a];
  }
  for (std::size_t a = 0; a < values.size(); ++a) out[a] /= total;
}

void action_distribution(const ForwardTrace& trace, double beta, Readout readout,
                         std::span<double> out) {
  const auto& last = trace.layers.back();
  if (readout == Readout::Intensity) softmax(last.intensities, beta, out);
  else softmax(last.trains_real, beta, out);
}

std::vector<double> action_distribution(const ForwardTrace& trace, double beta, Readout readout) {
  std::vector<double> probs(trace.layers.back().agent_count);
  action_distribution(trace, beta, readout, probs);
  return probs;
}

}  // namespace sarl
