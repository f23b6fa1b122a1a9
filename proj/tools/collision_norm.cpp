// collision-norm <experiment> [--config FILE] [--set key=value]... [--out FILE.csv]
//
// Exit status: 0 success, 1 configuration error, 2 solver failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "collision_norm/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cnorm::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobolev-norm collision force bounds for interactive robot models"};
  std::string experiment;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;

  std::string choices;
  for (const auto& name : cnorm::experiment_names()) choices += "\n  " + name;
  app.add_option("experiment", experiment, "One of:" + choices)->required();
  app.add_option("--config", config_path, "key = value file");
  app.add_option("--set", overrides, "key=value override, wins over --config")
      ->allow_extra_args(false);
  app.add_option("--out", out_path, "CSV destination (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    cnorm::ExperimentConfig cfg(experiment);
    if (!config_path.empty()) cfg.merge_text(read_file(config_path), config_path);
    for (const auto& kv : overrides) cfg.set_assignment(kv);

    const cnorm::ResultTable table = cnorm::run(cfg);
    const std::string csv = table.to_csv();
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw cnorm::ConfigError("cannot write '" + out_path + "'");
      out << csv;
    }
    for (const auto& note : table.notes) std::cerr << note << '\n';
    return 0;
  } catch (const cnorm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cnorm::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
