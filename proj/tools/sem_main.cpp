#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sem/error.hpp"
#include "sem/pipeline.hpp"

namespace {

int exit_code(sem::ErrorKind k) {
  return k == sem::ErrorKind::io || k == sem::ErrorKind::parse ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival energy FDA mortality forecasting"};
  app.require_subcommand(1);
  std::string config, out;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"ingest", "fit", "forecast", "evaluate", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI configuration")->required();
    sub->add_option("--out", out, "output directory (overrides [paths] output)");
    sub->add_option("--seed", seed, "random seed (overrides [run] seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    auto cfg = sem::load_config(config);
    if (!out.empty()) cfg.output_dir = out;
    if (seed) cfg.seed = *seed;
    if (cmd == "ingest") sem::run_ingest(cfg, std::cout);
    else if (cmd == "fit") sem::run_fit(cfg, std::cout);
    else if (cmd == "forecast") sem::run_forecast(cfg, std::cout);
    else if (cmd == "evaluate") sem::run_evaluate(cfg, std::cout);
    else return sem::run_verify(cfg, std::cout) ? 0 : 1;
  } catch (const sem::Error& e) {
    std::cerr << "sem " << cmd << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "sem " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
