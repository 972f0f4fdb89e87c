#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "davg/algorithms.hpp"
#include "davg/topology.hpp"

namespace davg {

enum class ExperimentFamily { Convergence, SampleComplexity, NonAsymptotic };
enum class AlgorithmKind { Sda, Dsg, Dmasg };

const char* algorithm_name(AlgorithmKind kind);

struct ExperimentConfig {
  ExperimentFamily family = ExperimentFamily::Convergence;
  std::vector<TopologySpec> topologies;
  std::vector<AlgorithmKind> algorithms;
  int n_reps = 50;
  std::uint64_t seed = 0;
  double b = 1.0;
  double sigma = 1.0;
  int dim = 1;

  // Convergence: iteration counts; empty means derive one count per D-MASG
  // stage number in [dmasg_k_min, dmasg_k_max] for each topology.
  std::vector<int> t_grid;
  int dmasg_k_min = 3;
  int dmasg_k_max = 8;

  // Sample complexity: target accuracies, strictly decreasing.
  std::vector<double> eps_grid;
  long long t_cap = 200000;
  int t_stride = 1;  // iteration-count schedule: 1 reproduces unit steps

  // Non-asymptotic: star sizes.
  std::vector<int> n_grid;

  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SummaryRow {
  std::string config_echo;
  double x_value = 0.0;  // T, epsilon, or kappa(L) depending on the family
  double mean_mse = 0.0;
  double std_error = 0.0;
  long long samples_per_node = 0;
};

std::vector<SummaryRow> run_convergence(const ExperimentConfig& config);
std::vector<SummaryRow> run_sample_complexity(const ExperimentConfig& config);
std::vector<SummaryRow> run_non_asymptotic(const ExperimentConfig& config);

std::vector<SummaryRow> run_experiment(const ExperimentConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
};

// Ordinary least squares on (ln x, ln y). Requires at least two points with
// positive coordinates.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& xy);
SlopeFit fit_loglog_slope(const std::vector<SummaryRow>& rows);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& header_comments);

}  // namespace davg
