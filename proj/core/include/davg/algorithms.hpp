#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "davg/gossip.hpp"
#include "davg/observation.hpp"

namespace davg {

/// Parameters of the dual accelerated run: constant step and momentum, with
/// the output averaged over the iterates after the burn-in time.
struct SdaParams {
  int t_total = 0;
  int t_burn = 0;  // T0: iterates before this are excluded from the average
  double eta = 0.0;
  double zeta = 0.0;
  std::vector<int> batch_sizes;  // per-iteration m_t; empty means all 1
  bool burn_in_below_k_star = false;

  void validate() const;
  long long samples_per_node() const;
};

// T0 = floor(T/2), eta = 1/lambda_1(L), zeta = (sqrt(k)-1)/(sqrt(k)+1).
// Flags (without failing) the case where the burn-in is shorter than k*.
SdaParams theorem1_params(const GossipSpec& gossip, int t_total);

struct DmasgParams {
  std::vector<int> stage_lengths;
  std::vector<double> stage_steps;
  std::vector<double> stage_momenta;

  int n_stages() const { return static_cast<int>(stage_lengths.size()); }
  int t_total() const;
  void validate() const;
};

// Single stage covering all of t_total: alpha = lambda_min(W1)/2 and
// beta = (1-sqrt(alpha))/(1+sqrt(alpha)).
DmasgParams dmasg_single_stage(const WeightMatrix& shifted, int t_total);

// K-stage schedule: t_k = 2^k ceil(7 sqrt(2/lambda_min(W1)) ln 2) for k >= 2,
// t_1 = sum of the later stages, alpha_k = lambda_min(W1)/2^(2k+1) after
// stage one. Total length comes out to 2 t_1.
DmasgParams dmasg_schedule(const WeightMatrix& shifted, int n_stages);

struct RunResult {
  Eigen::MatrixXd final_estimates;  // n_nodes x dim
  std::vector<int> trace_ts;
  std::vector<double> trace_sq_error;  // sum_i |theta_{i,t} - target|^2
  long long samples_used_per_node = 0;
  std::string algorithm_tag;
};

struct TraceOptions {
  // 0 = auto: every iteration for T <= 10^4, else a logarithmic grid.
  int stride = 0;
  bool enabled = true;
};

std::vector<int> trace_schedule(int t_total, const TraceOptions& opts);

// Observation source for the generic engine: draw `draw` for (node, t).
using SampleSource =
    std::function<Eigen::VectorXd(int node, int t, int draw)>;

struct SdaOptions {
  TraceOptions trace;
  // Polyak output error |theta_hat(T) - target|^2 evaluated for every T in
  // eval_ts (each with its own floor(T/2) burn-in), from a single trajectory.
  // Only valid when eta/zeta do not depend on T, which holds for the
  // theorem-driven parameter choices.
  std::vector<int> eval_ts;
  std::function<void(int t, const Eigen::MatrixXd& theta)> observer;
};

struct SdaRun : RunResult {
  std::vector<double> eval_mse;  // aligned with SdaOptions::eval_ts
};

// Generic engine: target may be null when no trace/eval output is wanted.
SdaRun run_sda_source(const GossipSpec& gossip, int dim,
                      const SampleSource& source, const SdaParams& params,
                      const Eigen::VectorXd* target,
                      const SdaOptions& options = {});

SdaRun run_sda(const GossipSpec& gossip, const ObservationModel& model,
               const SdaParams& params, std::uint64_t replication,
               const SdaOptions& options = {});

struct DsgOptions {
  TraceOptions trace;
  std::vector<int> eval_ts;  // state error snapshots
};

struct DsgRun : RunResult {
  std::vector<double> eval_mse;
};

DsgRun run_dsg(const WeightMatrix& weights, const ObservationModel& model,
               int t_total, std::uint64_t replication,
               const DsgOptions& options = {});

RunResult run_dmasg(const WeightMatrix& shifted, const ObservationModel& model,
                    const DmasgParams& params, std::uint64_t replication,
                    const TraceOptions& trace = {});

// Columns (t, sum_sq_error) after a block of '#' comment lines.
void write_trace_csv(std::ostream& out, const RunResult& run,
                     const std::vector<std::string>& header_comments);

}  // namespace davg
