#include "sarl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sarl/baselines.hpp"
#include "sarl/critic.hpp"
#include "sarl/envs.hpp"
#include "sarl/errors.hpp"
#include "sarl/training.hpp"

namespace sarl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

std::string task_name(Task t) { return t == Task::Gridworld ? "gridworld" : "cartpole"; }
std::string method_name(Method m) { return m == Method::Spiking ? "spiking" : "tabular"; }
std::string mask_name(MaskMode m) { return m == MaskMode::Modular ? "modular" : "full"; }

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define SARL_SIZE_FIELD(member)                                                        \
  Field {                                                                              \
    #member, [](const ExperimentConfig& c) { return std::to_string(c.member); },       \
        [](ExperimentConfig& c, std::string_view v) {                                  \
          c.member = parse_number<std::size_t>(#member, v);                            \
        }                                                                              \
  }
#define SARL_REAL_FIELD(member)                                                              \
  Field {                                                                                    \
    #member, [](const ExperimentConfig& c) { return format_number(c.member); },              \
        [](ExperimentConfig& c, std::string_view v) { c.member = parse_number<double>(#member, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"name", [](const ExperimentConfig& c) { return c.name; },
       [](ExperimentConfig& c, std::string_view v) { c.name = std::string(v); }},
      {"task", [](const ExperimentConfig& c) { return task_name(c.task); },
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "gridworld") c.task = Task::Gridworld;
         else if (v == "cartpole") c.task = Task::CartPole;
         else throw ConfigError("task must be gridworld or cartpole, got '" + std::string(v) + "'");
       }},
      {"method", [](const ExperimentConfig& c) { return method_name(c.method); },
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "spiking") c.method = Method::Spiking;
         else if (v == "tabular") c.method = Method::Tabular;
         else throw ConfigError("method must be spiking or tabular, got '" + std::string(v) + "'");
       }},
      SARL_SIZE_FIELD(hidden_count),
      SARL_SIZE_FIELD(hidden_train_length),
      SARL_SIZE_FIELD(hidden_kernel_width),
      SARL_SIZE_FIELD(output_kernel_width),
      SARL_SIZE_FIELD(post_spike_width),
      SARL_SIZE_FIELD(coupling_width),
      {"mask", [](const ExperimentConfig& c) { return mask_name(c.mask_mode); },
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "modular") c.mask_mode = MaskMode::Modular;
         else if (v == "full") c.mask_mode = MaskMode::Full;
         else throw ConfigError("mask must be modular or full, got '" + std::string(v) + "'");
       }},
      SARL_SIZE_FIELD(modules),
      SARL_SIZE_FIELD(population_size),
      SARL_REAL_FIELD(alpha),
      SARL_REAL_FIELD(alpha_critic),
      SARL_REAL_FIELD(gamma),
      SARL_REAL_FIELD(beta),
      {"readout",
       [](const ExperimentConfig& c) {
         return std::string(c.readout == Readout::Intensity ? "intensity" : "spike");
       },
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "intensity") c.readout = Readout::Intensity;
         else if (v == "spike") c.readout = Readout::Spike;
         else throw ConfigError("readout must be intensity or spike, got '" + std::string(v) + "'");
       }},
      SARL_REAL_FIELD(init_scale),
      SARL_REAL_FIELD(temperature),
      SARL_SIZE_FIELD(tilings),
      SARL_SIZE_FIELD(tiles),
      SARL_SIZE_FIELD(episodes),
      SARL_SIZE_FIELD(trials),
      SARL_SIZE_FIELD(max_episode_steps),
      {"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
       [](ExperimentConfig& c, std::string_view v) {
         c.seed = parse_number<std::uint64_t>("seed", v);
       }},
      SARL_SIZE_FIELD(workers),
      {"out", [](const ExperimentConfig& c) { return c.out; },
       [](ExperimentConfig& c, std::string_view v) { c.out = std::string(v); }},
  };
  return table;
}

#undef SARL_SIZE_FIELD
#undef SARL_REAL_FIELD

std::size_t cart_pop_size(std::string_view name) {
  constexpr std::string_view prefix = "cart-pop-";
  if (!name.starts_with(prefix)) return 0;
  const auto digits = name.substr(prefix.size());
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return 0;
  return n;
}

ExperimentConfig grid_spiking() {
  ExperimentConfig c;
  c.name = "grid-spiking";
  c.task = Task::Gridworld;
  c.method = Method::Spiking;
  c.hidden_count = 5;
  c.hidden_train_length = 3;
  c.hidden_kernel_width = 3;
  c.output_kernel_width = 3;
  c.mask_mode = MaskMode::Full;
  c.modules = 1;
  c.population_size = 10;
  c.alpha = 0.05;
  c.alpha_critic = 0.1;
  c.gamma = 0.99;
  c.beta = 5.0;
  c.episodes = 5000;
  c.trials = 20;
  c.max_episode_steps = kGridEpisodeCap;
  return c;
}

ExperimentConfig grid_tabular() {
  ExperimentConfig c = grid_spiking();
  c.name = "grid-tabular";
  c.method = Method::Tabular;
  c.population_size = 1;
  c.alpha = 0.5;
  c.alpha_critic = 0.1;
  c.temperature = 1.0;
  return c;
}

ExperimentConfig cart_base(std::string name, MaskMode mask, std::size_t population) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.task = Task::CartPole;
  c.method = Method::Spiking;
  c.hidden_count = 200;
  c.hidden_train_length = 1;
  c.hidden_kernel_width = 1;
  c.output_kernel_width = 1;
  c.mask_mode = mask;
  c.modules = mask == MaskMode::Modular ? 2 : 1;
  c.population_size = population;
  c.alpha = 0.01;
  c.alpha_critic = 0.05;
  c.init_scale = 1.0;
  c.gamma = 0.99;
  c.beta = 5.0;
  c.episodes = 1000;
  c.trials = 20;
  c.max_episode_steps = kCartHorizon;
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (episodes == 0) throw ConfigError("episodes must be >= 1");
  if (!(alpha > 0.0) || !(alpha_critic > 0.0) || !(beta > 0.0) || !(temperature > 0.0))
    throw ConfigError("alpha, alpha_critic, beta and temperature must be > 0");
  if (!(gamma > 0.0) || gamma > 1.0) throw ConfigError("gamma must lie in (0, 1]");
  if (init_scale < 0.0) throw ConfigError("init_scale must be >= 0");
  if (population_size == 0) throw ConfigError("population_size must be >= 1");
  if (max_episode_steps == 0) throw ConfigError("max_episode_steps must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (out.empty()) throw ConfigError("output path must not be empty");
  if (method == Method::Tabular && task != Task::Gridworld)
    throw ConfigError("the tabular baseline is only defined for the gridworld");
  if (method == Method::Spiking) network_spec().validate();
  if (task == Task::CartPole && (tilings == 0 || tiles == 0))
    throw ConfigError("tilings and tiles must be >= 1");
}

NetworkSpec ExperimentConfig::network_spec() const {
  NetworkSpec spec;
  const bool grid = task == Task::Gridworld;
  spec.input_channels = grid ? Gridworld::kInputChannels : CartPole::kInputChannels;
  spec.input_length = grid ? Gridworld::kInputLength : CartPole::kInputLength;
  const std::size_t actions = grid ? Gridworld::kActionCount : CartPole::kActionCount;

  LayerSpec hidden;
  hidden.agent_count = hidden_count;
  hidden.train_length = hidden_train_length;
  hidden.kernel_width = hidden_kernel_width;
  hidden.post_spike_width = post_spike_width;
  hidden.coupling_width = coupling_width;

  LayerSpec output;
  output.agent_count = actions;
  output.train_length = 1;
  output.kernel_width = output_kernel_width;

  spec.layers = {hidden, output};
  if (hidden_count == 0) throw ConfigError("hidden_count must be >= 1");
  spec.masks = {ConnectivityMask::full(spec.input_channels, hidden_count),
                mask_mode == MaskMode::Modular ? modular_mask(hidden_count, actions, modules)
                                               : ConnectivityMask::full(hidden_count, actions)};
  return spec;
}

std::vector<std::string> preset_names() {
  return {"grid-spiking", "grid-tabular", "cart-modular", "cart-full", "cart-pop-N"};
}

ExperimentConfig preset(std::string_view name) {
  if (name == "grid-spiking") return grid_spiking();
  if (name == "grid-tabular") return grid_tabular();
  if (name == "cart-modular") return cart_base("cart-modular", MaskMode::Modular, 10);
  if (name == "cart-full") return cart_base("cart-full", MaskMode::Full, 10);
  // literal N: population size comes from --population-size (default 10)
  if (name == "cart-pop-N") return cart_base("cart-pop-N", MaskMode::Modular, 10);
  if (const auto n = cart_pop_size(name); n > 0)
    return cart_base(std::string(name), MaskMode::Modular, n);

  std::string msg = "unknown preset '" + std::string(name) + "'; available:";
  for (const auto& p : preset_names()) msg += " " + p;
  throw UsageError(msg);
}

std::vector<std::string> field_names() {
  std::vector<std::string> names;
  for (const auto& f : fields()) names.emplace_back(f.key);
  return names;
}

std::string to_key_value(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + "=" + f.get(config) + "\n";
  return out;
}

void set_field(ExperimentConfig& config, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_key_value(ExperimentConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    set_field(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

namespace {

std::vector<CurveRow> run_spiking_trial(const ExperimentConfig& config, std::size_t trial) {
  Rng rng(config.seed + trial);
  Ensemble ensemble(config.network_spec(), config.population_size, rng, config.init_scale);
  ActorConfig actor;
  actor.alpha = config.alpha;
  actor.beta = config.beta;
  actor.readout = config.readout;
  actor.population_size = config.population_size;
  actor.max_episode_steps = config.max_episode_steps;
  actor.episode_count = config.episodes;

  std::vector<CurveRow> rows;
  rows.reserve(config.episodes);
  StepRecord record;
  const auto record_row = [&](std::size_t e, const EpisodeResult& r) {
    rows.push_back({trial, e, r.episode_return, r.steps, r.discounted_return});
  };

  if (config.task == Task::Gridworld) {
    TabularCritic critic(Gridworld::kStateCount, config.alpha_critic, config.gamma);
    Gridworld env(config.max_episode_steps);
    for (std::size_t e = 0; e < config.episodes; ++e)
      record_row(e, run_episode(ensemble, critic, env, actor, rng, record));
  } else {
    auto critic = make_cartpole_critic(config.alpha_critic, config.gamma, config.tilings, config.tiles);
    CartPole env(config.max_episode_steps);
    for (std::size_t e = 0; e < config.episodes; ++e)
      record_row(e, run_episode(ensemble, critic, env, actor, rng, record));
  }
  return rows;
}

std::vector<CurveRow> run_tabular_trial(const ExperimentConfig& config, std::size_t trial) {
  Rng rng(config.seed + trial);
  TabularActor actor(Gridworld::kStateCount, Gridworld::kActionCount, config.temperature);
  TabularCritic critic(Gridworld::kStateCount, config.alpha_critic, config.gamma);
  Gridworld env(config.max_episode_steps);
  std::vector<CurveRow> rows;
  rows.reserve(config.episodes);
  for (std::size_t e = 0; e < config.episodes; ++e) {
    const auto r = run_tabular_episode(actor, critic, env, config.alpha, config.max_episode_steps, rng);
    rows.push_back({trial, e, r.episode_return, r.steps, r.discounted_return});
  }
  return rows;
}

}  // namespace

LearningCurve run_experiment(const ExperimentConfig& config, const TrialCallback& on_trial) {
  config.validate();
  std::vector<std::vector<CurveRow>> per_trial(config.trials);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  const auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      per_trial[t] = config.method == Method::Tabular ? run_tabular_trial(config, t)
                                                      : run_spiking_trial(config, t);
      if (on_trial) {
        std::lock_guard lock(callback_mutex);
        on_trial(t);
      }
    }
  };

  const std::size_t n_workers = std::min(config.workers, config.trials);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  LearningCurve curve;
  curve.trials = config.trials;
  curve.episodes = config.episodes;
  curve.rows.reserve(config.trials * config.episodes);
  for (auto& rows : per_trial) curve.rows.insert(curve.rows.end(), rows.begin(), rows.end());
  return curve;
}

std::vector<AggregateRow> aggregate(const LearningCurve& curve) {
  std::vector<AggregateRow> out(curve.episodes);
  const double n = static_cast<double>(curve.trials);
  for (std::size_t e = 0; e < curve.episodes; ++e) {
    double sum_r = 0.0, sum_s = 0.0;
    for (std::size_t t = 0; t < curve.trials; ++t) {
      const auto& row = curve.rows[t * curve.episodes + e];
      sum_r += row.episode_return;
      sum_s += static_cast<double>(row.steps);
    }
    const double mean_r = sum_r / n;
    const double mean_s = sum_s / n;
    double ss_r = 0.0, ss_s = 0.0;
    for (std::size_t t = 0; t < curve.trials; ++t) {
      const auto& row = curve.rows[t * curve.episodes + e];
      ss_r += (row.episode_return - mean_r) * (row.episode_return - mean_r);
      ss_s += (static_cast<double>(row.steps) - mean_s) * (static_cast<double>(row.steps) - mean_s);
    }
    const double dof = curve.trials > 1 ? n - 1.0 : 1.0;
    out[e] = {e, mean_r, std::sqrt(ss_r / dof) / std::sqrt(n), mean_s, std::sqrt(ss_s / dof) / std::sqrt(n)};
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string raw_csv(const LearningCurve& curve) {
  std::string out = "trial,episode,return,steps,discounted_return\n";
  for (const auto& r : curve.rows) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.episode) + ',' +
           format_number(r.episode_return) + ',' + std::to_string(r.steps) + ',' +
           format_number(r.discounted_return) + '\n';
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "episode,mean_return,se_return,mean_steps,se_steps\n";
  for (const auto& r : rows) {
    out += std::to_string(r.episode) + ',' + format_number(r.mean_return) + ',' +
           format_number(r.se_return) + ',' + format_number(r.mean_steps) + ',' +
           format_number(r.se_steps) + '\n';
  }
  return out;
}

std::string aggregate_path(const std::string& raw_path) {
  constexpr std::string_view suffix = ".csv";
  if (raw_path.size() > suffix.size() && raw_path.ends_with(suffix))
    return raw_path.substr(0, raw_path.size() - suffix.size()) + "_aggregate.csv";
  return raw_path + "_aggregate.csv";
}

void check_writable(const std::string& raw_path) {
  for (const auto& path : {raw_path, aggregate_path(raw_path)}) {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
  }
}

void write_outputs(const std::string& raw_path, const LearningCurve& curve) {
  const auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    f << text;
  };
  write(raw_path, raw_csv(curve));
  write(aggregate_path(raw_path), aggregate_csv(aggregate(curve)));
}

}  // namespace sarl
