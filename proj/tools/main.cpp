#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "davg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"davg - stochastic distributed averaging over networks"};
  app.require_subcommand(1);

  davg::cli::CliOptions options;
  app.add_option("--threads", options.threads,
                 "worker threads for replications (default: all cores)");
  app.add_flag("--paper-scale", options.paper_scale,
               "run the full-size experiment configuration");
  app.add_option("--out", options.out_dir, "directory for output files");

  std::string run_config, spectrum_config, bound_config;
  auto* run = app.add_subcommand("run", "execute an algorithm run or experiment");
  run->add_option("config", run_config, "JSON config file")->required();
  auto* spectrum =
      app.add_subcommand("spectrum", "print the spectral summary of a topology");
  spectrum->add_option("config", spectrum_config, "JSON config file")->required();
  auto* bound = app.add_subcommand("bound", "print the theoretical error bounds");
  bound->add_option("config", bound_config, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return davg::cli::cmd_run(run_config, options, std::cout, std::cerr);
  if (spectrum->parsed())
    return davg::cli::cmd_spectrum(spectrum_config, options, std::cout, std::cerr);
  return davg::cli::cmd_bound(bound_config, options, std::cout, std::cerr);
}
