#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qdent/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Steady-state and transient entanglement of two driven quantum dots in a photonic-crystal dimer"};
  app.set_version_flag("--version", std::string(QDENT_VERSION));

  std::string config_path;
  std::string output_dir;
  std::size_t truncation = 0;
  unsigned threads = 1;
  long long seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration file")->required();
  app.add_option("--output", output_dir, "Output directory (overrides output.directory)");
  app.add_option("--truncation", truncation, "Fock cutoff per mode (overrides system.truncation)")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Worker threads for sweeps (0 = all cores)");
  app.add_option("--seed", seed, "Reserved; all computations are deterministic");
  app.add_flag("--quiet", quiet, "Suppress progress messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qdent::kExitConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "qdent: cannot read config '" << config_path << "'\n";
    return qdent::kExitIo;
  }
  std::ostringstream text;
  text << in.rdbuf();

  qdent::RunConfig config;
  try {
    config = qdent::parse_config(text.str());
    if (truncation > 0) {
      config.params.truncation = truncation;
      config.params.validate();
    }
  } catch (const qdent::ConfigError& e) {
    std::cerr << "qdent: " << config_path << ": " << e.what() << "\n";
    return qdent::kExitConfig;
  } catch (const qdent::DomainError& e) {
    std::cerr << "qdent: " << e.what() << "\n";
    return qdent::kExitConfig;
  }
  if (!output_dir.empty()) config.output.directory = output_dir;

  qdent::RunOptions options;
  options.threads = threads;
  options.quiet = quiet;
  return qdent::run(config, options);
}
