#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sarl/network.hpp"

namespace sarl {

enum class Task { Gridworld, CartPole };
enum class Method { Spiking, Tabular };
enum class MaskMode { Modular, Full };

struct ExperimentConfig {
  std::string name = "custom";
  Task task = Task::Gridworld;
  Method method = Method::Spiking;

  // topology: input -> hidden -> output; input -> hidden is always full
  std::size_t hidden_count = 5;
  std::size_t hidden_train_length = 3;
  std::size_t hidden_kernel_width = 3;
  std::size_t output_kernel_width = 3;
  std::size_t post_spike_width = 0;
  std::size_t coupling_width = 0;
  MaskMode mask_mode = MaskMode::Full;  // hidden -> output
  std::size_t modules = 1;

  std::size_t population_size = 10;
  double alpha = 0.01;         // actor
  double alpha_critic = 0.1;   // critic (per active feature for tile coding)
  double gamma = 0.99;
  double beta = 5.0;           // readout temperature
  Readout readout = Readout::Spike;
  double init_scale = 0.5;
  double temperature = 1.0;    // tabular actor softmax temperature
  std::size_t tilings = 8;
  std::size_t tiles = 8;

  std::size_t episodes = 1000;
  std::size_t trials = 20;
  std::size_t max_episode_steps = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out = "curve.csv";

  /// Throws ConfigError.
  void validate() const;
  NetworkSpec network_spec() const;
};

std::vector<std::string> preset_names();
/// grid-spiking, grid-tabular, cart-modular, cart-full, cart-pop-N (N >= 1).
/// Throws UsageError listing the presets for an unknown name.
ExperimentConfig preset(std::string_view name);

/// Flat key=value text, one field per line, in a fixed order.
std::string to_key_value(const ExperimentConfig& config);
/// Sets one field from its key=value spelling. Throws ConfigError.
void set_field(ExperimentConfig& config, std::string_view key, std::string_view value);
/// Applies every key=value line; blank lines and '#' comments are skipped.
void apply_key_value(ExperimentConfig& config, std::string_view text);
std::vector<std::string> field_names();

struct CurveRow {
  std::size_t trial = 0;
  std::size_t episode = 0;
  double episode_return = 0.0;
  std::size_t steps = 0;
  double discounted_return = 0.0;
};

struct LearningCurve {
  std::size_t trials = 0;
  std::size_t episodes = 0;
  std::vector<CurveRow> rows;  // trial-major
};

struct AggregateRow {
  std::size_t episode = 0;
  double mean_return = 0.0;
  double se_return = 0.0;
  double mean_steps = 0.0;
  double se_steps = 0.0;
};

/// Called after each finished trial with its index (from worker threads).
using TrialCallback = std::function<void(std::size_t trial)>;

/// Runs config.trials independent trials; trial i is seeded with seed + i and
/// gets a fresh learner, critic and environment. Rows are merged in trial order.
LearningCurve run_experiment(const ExperimentConfig& config, const TrialCallback& on_trial = {});

/// Per-episode mean and standard error (sample stddev / sqrt(trials)) across trials.
std::vector<AggregateRow> aggregate(const LearningCurve& curve);

/// Header `trial,episode,return,steps,discounted_return`.
std::string raw_csv(const LearningCurve& curve);
/// Header `episode,mean_return,se_return,mean_steps,se_steps`.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

/// "runs/x.csv" -> "runs/x_aggregate.csv"; a missing .csv suffix is appended to.
std::string aggregate_path(const std::string& raw_path);

/// Throws ConfigError if the raw or aggregate file cannot be opened for writing.
void check_writable(const std::string& raw_path);
void write_outputs(const std::string& raw_path, const LearningCurve& curve);

/// Shortest round-trip decimal spelling used for every CSV value.
std::string format_number(double v);

}  // namespace sarl
