#include "davg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "davg/csv.hpp"
#include "davg/parallel.hpp"

namespace davg {

const char* algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Sda: return "sda";
    case AlgorithmKind::Dsg: return "dsg";
    case AlgorithmKind::Dmasg: return "dmasg";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n_reps < 1) throw std::invalid_argument("experiment: n_reps < 1");
  if (topologies.empty() && family != ExperimentFamily::NonAsymptotic)
    throw std::invalid_argument("experiment: no topologies");
  if (dim < 1) throw std::invalid_argument("experiment: dim < 1");
  if (b < 0.0 || sigma < 0.0)
    throw std::invalid_argument("experiment: b and sigma must be >= 0");
  switch (family) {
    case ExperimentFamily::Convergence:
      if (algorithms.empty())
        throw std::invalid_argument("experiment: no algorithms");
      if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("experiment: t_grid must be sorted");
      break;
    case ExperimentFamily::SampleComplexity:
      if (eps_grid.empty())
        throw std::invalid_argument("experiment: eps_grid is empty");
      for (double e : eps_grid)
        if (!(e > 0.0)) throw std::invalid_argument("experiment: eps must be positive");
      if (!std::is_sorted(eps_grid.rbegin(), eps_grid.rend()))
        throw std::invalid_argument("experiment: eps_grid must be descending");
      if (t_cap < 1 || t_stride < 1)
        throw std::invalid_argument("experiment: t_cap and t_stride must be >= 1");
      break;
    case ExperimentFamily::NonAsymptotic:
      if (n_grid.empty())
        throw std::invalid_argument("experiment: n_grid is empty");
      if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw std::invalid_argument("experiment: n_grid must be sorted");
      break;
  }
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  MeanSe out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

std::string echo(const TopologySpec& spec, AlgorithmKind algo,
                 const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "algorithm=" << algorithm_name(algo)
    << " topology=" << graph_kind_name(spec.kind) << " n=" << spec.n
    << " b=" << fmt17(cfg.b) << " sigma=" << fmt17(cfg.sigma)
    << " dim=" << cfg.dim << " n_reps=" << cfg.n_reps << " seed=" << cfg.seed;
  return s.str();
}

std::uint64_t instance_seed(const ExperimentConfig& cfg, const TopologySpec& spec) {
  // one instance of means per (config seed, topology); replications share it
  return rng::chain(rng::mix64(cfg.seed), static_cast<std::uint64_t>(spec.kind)) ^
         static_cast<std::uint64_t>(spec.n);
}

// Mean MSE per requested iteration count, replications averaged. SDA and DSG
// evaluate every T from a single trajectory per replication; D-MASG runs one
// trajectory per stage arrangement (its schedule depends on T).
std::vector<MeanSe> sweep_mse(AlgorithmKind algo, const GossipSpec& gossip,
                              const WeightMatrix& weights,
                              const WeightMatrix& shifted,
                              const ProblemInstance& instance,
                              const std::vector<int>& ts, int n_reps,
                              int threads,
                              const std::vector<DmasgParams>* dmasg_params) {
  const int n_ts = static_cast<int>(ts.size());
  std::vector<std::vector<double>> per_rep(n_reps);
  const int t_max = ts.empty() ? 0 : ts.back();

  parallel_for(n_reps, threads, [&](int rep) {
    std::vector<double> mse;
    switch (algo) {
      case AlgorithmKind::Sda: {
        SdaOptions opt;
        opt.trace.enabled = false;
        opt.eval_ts = ts;
        const auto run = run_sda(gossip, instance.model,
                                 theorem1_params(gossip, t_max), rep, opt);
        mse = run.eval_mse;
        break;
      }
      case AlgorithmKind::Dsg: {
        DsgOptions opt;
        opt.trace.enabled = false;
        opt.eval_ts = ts;
        const auto run = run_dsg(weights, instance.model, t_max, rep, opt);
        mse = run.eval_mse;
        break;
      }
      case AlgorithmKind::Dmasg: {
        mse.reserve(n_ts);
        for (int k = 0; k < n_ts; ++k) {
          const DmasgParams params = dmasg_params
                                         ? (*dmasg_params)[k]
                                         : dmasg_single_stage(shifted, ts[k]);
          const auto run = run_dmasg(shifted, instance.model, params, rep,
                                     {.enabled = false});
          mse.push_back(
              (run.final_estimates.rowwise() - instance.target.transpose())
                  .squaredNorm());
        }
        break;
      }
    }
    per_rep[rep] = std::move(mse);
  });

  std::vector<MeanSe> out(n_ts);
  std::vector<double> column(n_reps);
  for (int k = 0; k < n_ts; ++k) {
    for (int rep = 0; rep < n_reps; ++rep) column[rep] = per_rep[rep][k];
    out[k] = mean_and_se(column);
  }
  return out;
}

}  // namespace

std::vector<SummaryRow> run_convergence(const ExperimentConfig& config) {
  config.validate();
  if (config.family != ExperimentFamily::Convergence)
    throw std::invalid_argument("run_convergence: wrong family");
  std::vector<SummaryRow> rows;
  for (const auto& spec : config.topologies) {
    const auto topology = build_topology(spec);
    const auto weights = metropolis_hastings(topology);
    const auto shifted = shifted_weights_dmasg(weights);
    const auto gossip = gossip_from_weights(weights);
    const auto instance = uniform_means_instance(
        spec.n, config.dim, config.b, config.sigma, instance_seed(config, spec));

    // The shared T grid comes from the D-MASG stage schedule unless the
    // config pins one. A user-pinned grid runs D-MASG in single-stage form.
    std::vector<int> ts = config.t_grid;
    std::vector<DmasgParams> schedules;
    const bool derived = ts.empty();
    if (derived) {
      for (int k = config.dmasg_k_min; k <= config.dmasg_k_max; ++k) {
        schedules.push_back(dmasg_schedule(shifted, k));
        ts.push_back(schedules.back().t_total());
      }
    }
    for (AlgorithmKind algo : config.algorithms) {
      const auto stats = sweep_mse(algo, gossip, weights, shifted, instance, ts,
                                   config.n_reps, config.threads,
                                   derived ? &schedules : nullptr);
      for (std::size_t k = 0; k < ts.size(); ++k) {
        SummaryRow row;
        row.config_echo = echo(spec, algo, config);
        row.x_value = ts[k];
        row.mean_mse = stats[k].mean;
        row.std_error = stats[k].se;
        row.samples_per_node = ts[k];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<SummaryRow> run_sample_complexity(const ExperimentConfig& config) {
  config.validate();
  if (config.family != ExperimentFamily::SampleComplexity)
    throw std::invalid_argument("run_sample_complexity: wrong family");
  std::vector<AlgorithmKind> algos = config.algorithms;
  if (algos.empty()) algos = {AlgorithmKind::Sda};

  std::vector<SummaryRow> rows;
  for (const auto& spec : config.topologies) {
    const auto topology = build_topology(spec);
    const auto weights = metropolis_hastings(topology);
    const auto shifted = shifted_weights_dmasg(weights);
    const auto gossip = gossip_from_weights(weights);
    const auto instance = uniform_means_instance(
        spec.n, config.dim, config.b, config.sigma, instance_seed(config, spec));

    std::vector<int> schedule;
    for (long long t = 1; t <= config.t_cap; t += config.t_stride)
      schedule.push_back(static_cast<int>(t));

    for (AlgorithmKind algo : algos) {
      if (algo == AlgorithmKind::Dmasg)
        throw std::invalid_argument(
            "run_sample_complexity: supported for sda and dsg only");
      const auto stats = sweep_mse(algo, gossip, weights, shifted, instance,
                                   schedule, config.n_reps, config.threads,
                                   nullptr);
      // Walk the schedule once; the stopping index for each accuracy is the
      // first iteration count whose replication-mean error is at or below it.
      std::size_t pos = 0;
      for (double eps : config.eps_grid) {
        while (pos < schedule.size() && stats[pos].mean > eps) ++pos;
        if (pos == schedule.size()) {
          std::ostringstream msg;
          msg << "sample complexity: mean MSE did not reach eps="
              << fmt17(eps) << " within t_cap=" << config.t_cap << " ("
              << echo(spec, algo, config) << ")";
          throw std::runtime_error(msg.str());
        }
        SummaryRow row;
        row.config_echo = echo(spec, algo, config) +
                          " t_stride=" + std::to_string(config.t_stride);
        row.x_value = eps;
        row.mean_mse = stats[pos].mean;
        row.std_error = stats[pos].se;
        // one observation per node per iteration in both supported methods
        row.samples_per_node = schedule[pos];
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<SummaryRow> run_non_asymptotic(const ExperimentConfig& config) {
  config.validate();
  if (config.family != ExperimentFamily::NonAsymptotic)
    throw std::invalid_argument("run_non_asymptotic: wrong family");
  std::vector<AlgorithmKind> algos = config.algorithms;
  if (algos.empty()) algos = {AlgorithmKind::Sda, AlgorithmKind::Dmasg};

  std::vector<SummaryRow> rows;
  for (int n : config.n_grid) {
    const TopologySpec spec{GraphKind::Star, n, 0.0, 0};
    const auto topology = build_topology(spec);
    const auto weights = metropolis_hastings(topology);
    const auto shifted = shifted_weights_dmasg(weights);
    const auto gossip = gossip_from_weights(weights);
    const auto instance = uniform_means_instance(
        n, config.dim, config.b, config.sigma, instance_seed(config, spec));
    // tolerance keeps T stable when kappa sits on an integer up to roundoff
    const int t = static_cast<int>(std::ceil(std::sqrt(gossip.kappa_l) - 1e-9));
    for (AlgorithmKind algo : algos) {
      if (algo == AlgorithmKind::Dsg)
        throw std::invalid_argument("run_non_asymptotic: dsg not part of this family");
      const auto stats = sweep_mse(algo, gossip, weights, shifted, instance,
                                   {std::max(t, 2)}, config.n_reps,
                                   config.threads, nullptr);
      SummaryRow row;
      row.config_echo = echo(spec, algo, config) + " t=" + std::to_string(t);
      row.x_value = gossip.kappa_l;
      row.mean_mse = stats[0].mean;
      row.std_error = stats[0].se;
      row.samples_per_node = std::max(t, 2);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SummaryRow> run_experiment(const ExperimentConfig& config) {
  switch (config.family) {
    case ExperimentFamily::Convergence: return run_convergence(config);
    case ExperimentFamily::SampleComplexity: return run_sample_complexity(config);
    case ExperimentFamily::NonAsymptotic: return run_non_asymptotic(config);
  }
  throw std::invalid_argument("run_experiment: unknown family");
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& xy) {
  const int n = static_cast<int>(xy.size());
  if (n < 2)
    throw std::invalid_argument("fit_loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > 0.0))
      throw std::invalid_argument("fit_loglog_slope: nonpositive value");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_loglog_slope: all x values identical");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0.0;
    const double intercept = my - fit.slope * mx;
    for (const auto& [x, y] : xy) {
      const double e = std::log(y) - (intercept + fit.slope * std::log(x));
      ssr += e * e;
    }
    fit.std_error = std::sqrt(ssr / (n - 2) / sxx);
  }
  return fit;
}

SlopeFit fit_loglog_slope(const std::vector<SummaryRow>& rows) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(rows.size());
  for (const auto& r : rows) xy.emplace_back(r.x_value, r.mean_mse);
  return fit_loglog_slope(xy);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  out << "x_value,mean_mse,std_error,samples_per_node,config\n";
  for (const auto& r : rows) {
    out << fmt17(r.x_value) << ',' << fmt17(r.mean_mse) << ','
        << fmt17(r.std_error) << ',' << r.samples_per_node << ','
        << r.config_echo << '\n';
  }
}

}  // namespace davg
