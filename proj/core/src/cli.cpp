#include "davg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "davg/applications.hpp"
#include "davg/bounds.hpp"
#include "davg/config.hpp"
#include "davg/csv.hpp"
#include "davg/experiments.hpp"

namespace davg::cli {

namespace {

std::string resolve_output(const CliOptions& options, const std::string& path) {
  std::filesystem::path p(path);
  if (!options.out_dir.empty() && p.is_relative())
    p = std::filesystem::path(options.out_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p.string();
}

std::vector<std::string> header_comments(const RunConfig& cfg) {
  return {
      std::string("davg ") + kToolVersion,
      "config-hash: " + [&] {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a(cfg.source_text)));
        return std::string(buf);
      }(),
      "master-seed: " + std::to_string(cfg.experiment.seed),
  };
}

// --paper-scale restores the full-size experiment configuration that the
// desk-scale defaults shrink: 100 nodes, 100 replications, the long star
// ladder, and the small-accuracy grid.
RunConfig apply_paper_scale(RunConfig cfg) {
  cfg.experiment.n_reps = 100;
  if (cfg.experiment.family == "convergence" ||
      cfg.experiment.family == "sample-complexity") {
    cfg.topology.n = 100;
    if (cfg.topology.kind == GraphKind::ErdosRenyi && cfg.topology.p <= 0.0)
      cfg.topology.p = 2.0 * std::log(100.0) / 100.0;
  }
  if (cfg.experiment.family == "non-asymptotic")
    cfg.experiment.n_grid = {148, 190, 244, 314, 403, 518, 665};
  if (cfg.experiment.family == "sample-complexity" && cfg.experiment.eps_grid.empty())
    cfg.experiment.eps_grid = {0.00033, 0.00027, 0.00022,
                               0.00018, 0.00015, 0.00012};
  return cfg;
}

struct BuiltGraph {
  Topology topology;
  WeightMatrix weights;
  GossipSpec gossip;
};

BuiltGraph build_graph(const RunConfig& cfg) {
  BuiltGraph g;
  g.topology = build_topology(cfg.topology);
  g.weights = metropolis_hastings(g.topology);
  g.gossip = gossip_from_weights(g.weights);
  return g;
}

void write_run_csv(std::ostream& out, const RunConfig& cfg,
                   const RunResult& run) {
  auto comments = header_comments(cfg);
  std::ostringstream echo;
  echo << "algorithm=" << run.algorithm_tag
       << " topology=" << graph_kind_name(cfg.topology.kind)
       << " n=" << cfg.topology.n << " b=" << fmt17(cfg.model.b)
       << " sigma=" << fmt17(cfg.model.sigma) << " dim=" << cfg.model.dim
       << " samples_per_node=" << run.samples_used_per_node;
  comments.push_back(echo.str());
  write_trace_csv(out, run, comments);
}

int run_single(const RunConfig& cfg, const CliOptions& options,
               std::ostream& out, std::ostream& err) {
  const auto g = build_graph(cfg);
  const auto instance =
      uniform_means_instance(cfg.topology.n, cfg.model.dim, cfg.model.b,
                             cfg.model.sigma, cfg.experiment.seed);
  if (cfg.algorithm.t_total < 1 && cfg.algorithm.params != "dmasg-schedule")
    throw ConfigError("config: algorithm.t_total must be set for a single run");

  TraceOptions trace;
  trace.stride = cfg.output.stride;
  RunResult result;
  if (cfg.algorithm.name == "sda") {
    SdaParams params;
    if (cfg.algorithm.params == "custom") {
      if (!cfg.algorithm.eta || !cfg.algorithm.zeta || !cfg.algorithm.t_burn)
        throw ConfigError(
            "config: algorithm.eta/zeta/t_burn are required with params=custom");
      params.t_total = cfg.algorithm.t_total;
      params.eta = *cfg.algorithm.eta;
      params.zeta = *cfg.algorithm.zeta;
      params.t_burn = *cfg.algorithm.t_burn;
    } else {
      params = theorem1_params(g.gossip, cfg.algorithm.t_total);
      if (params.burn_in_below_k_star)
        err << "warning: burn-in T/2 = " << params.t_burn
            << " is below k*; the finite-time bound's assumption is unmet\n";
    }
    SdaOptions opt;
    opt.trace = trace;
    result = run_sda(g.gossip, instance.model, params, 0, opt);
  } else if (cfg.algorithm.name == "dsg") {
    DsgOptions opt;
    opt.trace = trace;
    result = run_dsg(g.weights, instance.model, cfg.algorithm.t_total, 0, opt);
  } else {
    const auto shifted = shifted_weights_dmasg(g.weights);
    const DmasgParams params =
        cfg.algorithm.params == "dmasg-schedule"
            ? dmasg_schedule(shifted, cfg.algorithm.stages)
            : dmasg_single_stage(shifted, cfg.algorithm.t_total);
    result = run_dmasg(shifted, instance.model, params, 0, trace);
  }

  const std::string path = resolve_output(options, cfg.output.path);
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write output file " + path);
  write_run_csv(file, cfg, result);
  out << "wrote " << path << " (" << result.trace_ts.size() << " trace rows)\n";
  return 0;
}

}  // namespace

int cmd_run(const std::string& config_path, const CliOptions& options,
            std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = parse_run_config(config_path);
    if (options.paper_scale) cfg = apply_paper_scale(cfg);
    if (cfg.experiment.family == "single-run")
      return run_single(cfg, options, out, err);

    ExperimentConfig exp = to_experiment_config(cfg);
    exp.threads = options.threads;
    const auto rows = run_experiment(exp);
    const std::string path = resolve_output(options, cfg.output.path);
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write output file " + path);
    auto comments = header_comments(cfg);
    comments.push_back("family: " + cfg.experiment.family);
    write_summary_csv(file, rows, comments);
    out << "wrote " << path << " (" << rows.size() << " rows)\n";
    return 0;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}

int cmd_spectrum(const std::string& config_path, const CliOptions& options,
                 std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = parse_run_config(config_path);
    if (options.paper_scale) cfg = apply_paper_scale(cfg);
    const auto g = build_graph(cfg);
    const auto ks = compute_k_star(g.gossip.kappa_l);
    out << "topology    " << graph_kind_name(cfg.topology.kind)
        << " n=" << cfg.topology.n << '\n';
    out << "kappa(L)    " << fmt17(g.gossip.kappa_l) << '\n';
    out << "kappa(W)    " << fmt17(g.weights.kappa_w) << '\n';
    out << "lambda_1    " << fmt17(g.gossip.lambda_max()) << '\n';
    out << "lambda_N-1  " << fmt17(g.gossip.lambda_min_nonzero()) << '\n';
    out << "k_star      " << ks.value << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}

int cmd_bound(const std::string& config_path, const CliOptions& options,
              std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = parse_run_config(config_path);
    if (options.paper_scale) cfg = apply_paper_scale(cfg);
    if (cfg.algorithm.t_total < 1)
      throw ConfigError("config: algorithm.t_total must be set for bounds");
    const auto g = build_graph(cfg);
    const auto instance =
        uniform_means_instance(cfg.topology.n, cfg.model.dim, cfg.model.b,
                               cfg.model.sigma, cfg.experiment.seed);
    const auto sda = sda_upper_bound(g.gossip, instance, cfg.algorithm.t_total);
    const auto dsg = dsg_upper_bound(g.weights, instance, cfg.algorithm.t_total);
    out << "T: " << cfg.algorithm.t_total << "  kappa(L): "
        << fmt17(g.gossip.kappa_l) << "  bias_energy: "
        << fmt17(instance.bias_energy) << '\n';
    out << "sda bound: bias=" << fmt17(sda.bias_term)
        << " mid=" << fmt17(sda.variance_mid_term)
        << " tail=" << fmt17(sda.variance_tail_term)
        << " total=" << fmt17(sda.total) << '\n';
    if (sda.burn_in_warning)
      err << "warning: T/2 is below k_star (or T is odd); the bound's burn-in "
             "assumption is not met\n";
    out << "dsg bound: bias=" << fmt17(dsg.bias_term)
        << " mid=" << fmt17(dsg.variance_mid_term)
        << " tail=" << fmt17(dsg.variance_tail_term)
        << " total=" << fmt17(dsg.total) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace davg::cli
