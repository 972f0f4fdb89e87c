#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "davg/experiments.hpp"
#include "davg/topology.hpp"

namespace davg {

// Invalid or malformed configs raise this; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One JSON document drives the whole tool. Sections:
///   topology   {kind, n, p?, seed?}
///   model      {b, sigma, dim}
///   algorithm  {name, params, t_total?, stages?, eta?, zeta?, t_burn?}
///   experiment {family, n_reps, seed, t_grid?, eps_grid?, n_grid?, t_cap?, t_stride?}
///   output     {path, stride}
/// Unknown keys anywhere are rejected with the offending key named.
struct RunConfig {
  TopologySpec topology;

  struct Model {
    double b = 1.0;
    double sigma = 1.0;
    int dim = 1;
  } model;

  struct Algorithm {
    std::string name = "sda";     // sda | dsg | dmasg
    std::string params = "";      // theorem1 | theorem2 | dmasg-schedule |
                                  // single-stage | custom ("" = per-name default)
    int t_total = 0;
    int stages = 3;               // dmasg-schedule only
    std::optional<double> eta;    // custom sda
    std::optional<double> zeta;
    std::optional<int> t_burn;
  } algorithm;

  struct Experiment {
    std::string family = "single-run";  // single-run | convergence |
                                        // sample-complexity | non-asymptotic
    int n_reps = 50;
    std::uint64_t seed = 0;
    std::vector<int> t_grid;
    std::vector<double> eps_grid;
    std::vector<int> n_grid;
    long long t_cap = 200000;
    int t_stride = 1;
  } experiment;

  struct Output {
    std::string path = "out.csv";
    int stride = 0;
  } output;

  std::string source_text;  // raw file contents, hashed into output headers
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text);

// Maps the run-config sections onto an experiment description.
ExperimentConfig to_experiment_config(const RunConfig& cfg);

}  // namespace davg
