// Command-line front end for the spiking-agent experiment harness.
//
//   sarl run --preset grid-spiking --trials 20 --episodes 5000 --out runs/grid.csv
//   sarl list-presets
//   sarl print-config --preset cart-modular

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sarl/errors.hpp"
#include "sarl/harness.hpp"

namespace {

std::string flag_for(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

struct ConfigSource {
  std::string preset = "grid-spiking";
  std::string config_file;
  std::map<std::string, std::string> overrides;  // field -> value
};

void add_config_options(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("--preset", src.preset, "Preset name (see list-presets)");
  cmd->add_option("--config", src.config_file, "key=value file applied on top of the preset");
  for (const auto& key : sarl::field_names()) {
    if (key == "name") continue;
    cmd->add_option_function<std::string>(
        flag_for(key), [&src, key](const std::string& v) { src.overrides[key] = v; },
        "Override " + key);
  }
}

sarl::ExperimentConfig resolve(const ConfigSource& src) {
  auto config = sarl::preset(src.preset);
  if (!src.config_file.empty()) {
    std::ifstream f(src.config_file);
    if (!f) throw sarl::ConfigError("cannot read config file '" + src.config_file + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    sarl::apply_key_value(config, ss.str());
  }
  for (const auto& [key, value] : src.overrides) sarl::set_field(config, key, value);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking GLM agent actor-critic experiments"};
  app.require_subcommand(1);

  ConfigSource run_src, print_src;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write raw + aggregate CSVs");
  add_config_options(run, run_src);
  run->add_flag("--quiet", quiet, "Suppress progress output");

  app.add_subcommand("list-presets", "List experiment presets");
  auto* print = app.add_subcommand("print-config", "Print the resolved configuration");
  add_config_options(print, print_src);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-presets")) {
      for (const auto& name : sarl::preset_names()) std::cout << name << '\n';
      return 0;
    }
    if (app.got_subcommand("print-config")) {
      std::cout << sarl::to_key_value(resolve(print_src));
      return 0;
    }

    const auto config = resolve(run_src);
    sarl::check_writable(config.out);
    const auto start = std::chrono::steady_clock::now();
    const auto curve = sarl::run_experiment(config, [&](std::size_t trial) {
      if (!quiet) std::cerr << "trial " << trial << " done\n";
    });
    sarl::write_outputs(config.out, curve);
    if (!quiet) {
      const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cerr << "wrote " << config.out << " and " << sarl::aggregate_path(config.out) << " in "
                << secs << " s\n";
    }
    return 0;
  } catch (const sarl::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
