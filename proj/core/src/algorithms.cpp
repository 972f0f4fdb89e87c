#include "davg/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "davg/bounds.hpp"
#include "davg/csv.hpp"

namespace davg {

void SdaParams::validate() const {
  if (t_total < 1) throw std::invalid_argument("SdaParams: t_total < 1");
  if (t_burn < 0 || t_burn > t_total - 1)
    throw std::invalid_argument("SdaParams: t_burn must lie in [0, t_total-1]");
  if (!(eta > 0.0)) throw std::invalid_argument("SdaParams: eta must be positive");
  if (zeta < 0.0) throw std::invalid_argument("SdaParams: zeta must be >= 0");
  if (!batch_sizes.empty()) {
    if (static_cast<int>(batch_sizes.size()) != t_total)
      throw std::invalid_argument("SdaParams: batch_sizes length != t_total");
    for (int m : batch_sizes)
      if (m < 1) throw std::invalid_argument("SdaParams: batch size < 1");
  }
}

long long SdaParams::samples_per_node() const {
  if (batch_sizes.empty()) return t_total;
  long long s = 0;
  for (int m : batch_sizes) s += m;
  return s;
}

SdaParams theorem1_params(const GossipSpec& gossip, int t_total) {
  if (t_total < 2) throw std::invalid_argument("theorem1_params: t_total < 2");
  SdaParams p;
  p.t_total = t_total;
  p.t_burn = t_total / 2;
  const double kappa = gossip.kappa_l;
  const double rk = std::sqrt(kappa);
  p.eta = gossip.n() > 1 ? 1.0 / gossip.lambda_max() : 1.0;
  p.zeta = (rk - 1.0) / (rk + 1.0);
  p.burn_in_below_k_star = p.t_burn < compute_k_star(kappa).value;
  return p;
}

int DmasgParams::t_total() const {
  int t = 0;
  for (int s : stage_lengths) t += s;
  return t;
}

void DmasgParams::validate() const {
  const auto k = stage_lengths.size();
  if (k == 0 || stage_steps.size() != k || stage_momenta.size() != k)
    throw std::invalid_argument("DmasgParams: stage arrays must be nonempty and equal-length");
  for (std::size_t i = 0; i < k; ++i) {
    if (stage_lengths[i] < 1)
      throw std::invalid_argument("DmasgParams: stage length < 1");
    if (!(stage_steps[i] > 0.0))
      throw std::invalid_argument("DmasgParams: stage step must be positive");
    if (stage_momenta[i] < 0.0 || stage_momenta[i] >= 1.0)
      throw std::invalid_argument("DmasgParams: momentum must be in [0, 1)");
  }
}

namespace {

double shifted_lambda_min(const WeightMatrix& shifted) {
  const double lam = shifted.eigs_desc_by_magnitude.minCoeff();
  if (!(lam > 0.0))
    throw std::invalid_argument(
        "dmasg: shifted weight matrix must have positive spectrum");
  return lam;
}

double momentum_for_step(double alpha) {
  return (1.0 - std::sqrt(alpha)) / (1.0 + std::sqrt(alpha));
}

}  // namespace

DmasgParams dmasg_single_stage(const WeightMatrix& shifted, int t_total) {
  if (t_total < 1) throw std::invalid_argument("dmasg_single_stage: t_total < 1");
  const double alpha = shifted_lambda_min(shifted) / 2.0;
  DmasgParams p;
  p.stage_lengths = {t_total};
  p.stage_steps = {alpha};
  p.stage_momenta = {momentum_for_step(alpha)};
  p.validate();
  return p;
}

DmasgParams dmasg_schedule(const WeightMatrix& shifted, int n_stages) {
  if (n_stages < 2)
    throw std::invalid_argument("dmasg_schedule: need at least 2 stages");
  const double lam = shifted_lambda_min(shifted);
  const double kappa_tilde = 2.0 / lam;
  const int base =
      static_cast<int>(std::ceil(7.0 * std::sqrt(kappa_tilde) * std::log(2.0)));
  DmasgParams p;
  p.stage_lengths.assign(n_stages, 0);
  p.stage_steps.assign(n_stages, 0.0);
  p.stage_momenta.assign(n_stages, 0.0);
  int tail = 0;
  for (int k = 2; k <= n_stages; ++k) {
    const int len = (1 << k) * base;
    p.stage_lengths[k - 1] = len;
    tail += len;
    const double alpha = lam / std::pow(2.0, 2 * k + 1);
    p.stage_steps[k - 1] = alpha;
    p.stage_momenta[k - 1] = momentum_for_step(alpha);
  }
  p.stage_lengths[0] = tail;  // T = 2 * t_1
  p.stage_steps[0] = lam / 2.0;
  p.stage_momenta[0] = momentum_for_step(p.stage_steps[0]);
  p.validate();
  return p;
}

std::vector<int> trace_schedule(int t_total, const TraceOptions& opts) {
  std::vector<int> ts;
  if (!opts.enabled || t_total <= 0) return ts;
  int stride = opts.stride;
  if (stride < 0) throw std::invalid_argument("TraceOptions: negative stride");
  if (stride == 0 && t_total <= 10000) stride = 1;
  if (stride >= 1) {
    for (int t = 0; t < t_total; t += stride) ts.push_back(t);
    if (ts.back() != t_total - 1) ts.push_back(t_total - 1);
    return ts;
  }
  // logarithmic grid, ~400 points
  double t = 0.0;
  const double factor = std::pow(static_cast<double>(t_total), 1.0 / 400.0);
  int last = -1;
  while (true) {
    const int ti = static_cast<int>(t);
    if (ti >= t_total) break;
    if (ti != last) ts.push_back(ti);
    last = ti;
    t = std::max(t + 1.0, t * factor);
  }
  if (ts.back() != t_total - 1) ts.push_back(t_total - 1);
  return ts;
}

namespace {

double sum_sq_error(const Eigen::MatrixXd& state, const Eigen::VectorXd& target) {
  return (state.rowwise() - target.transpose()).squaredNorm();
}

SampleSource model_source(const ObservationModel& model,
                          std::uint64_t replication) {
  return [&model, replication](int node, int t, int draw) {
    return model.sample(node, t, replication, draw);
  };
}

}  // namespace

namespace {

// One dual-accelerated trajectory, advanced step by step. Observations come
// from a pure source, so two instances fed the same source replay the same
// trajectory exactly.
struct SdaState {
  Eigen::MatrixXd x, y, y_next, theta, prefix;
  int steps = 0;

  SdaState(int n, int dim)
      : x(Eigen::MatrixXd::Zero(n, dim)),
        y(Eigen::MatrixXd::Zero(n, dim)),
        y_next(n, dim),
        theta(n, dim),
        prefix(Eigen::MatrixXd::Zero(n, dim)) {}

  void step(const GossipSpec& gossip, const SampleSource& source,
            const SdaParams& params) {
    const int t = steps;
    const int m = params.batch_sizes.empty() ? 1 : params.batch_sizes[t];
    for (int i = 0; i < x.rows(); ++i) {
      Eigen::VectorXd r = source(i, t, 0);
      for (int l = 1; l < m; ++l) r += source(i, t, l);
      theta.row(i) = x.row(i) + r.transpose() / m;
    }
    prefix += theta;
    y_next = x - params.eta * (gossip.l * theta);
    x = y_next + params.zeta * (y_next - y);
    y.swap(y_next);
    ++steps;
  }
};

}  // namespace

SdaRun run_sda_source(const GossipSpec& gossip, int dim,
                      const SampleSource& source, const SdaParams& params,
                      const Eigen::VectorXd* target, const SdaOptions& options) {
  params.validate();
  const int n = gossip.n();
  const int t_total = params.t_total;
  if (target && target->size() != dim)
    throw std::invalid_argument("run_sda: target dimension mismatch");

  std::vector<int> trace_ts;
  if (target) trace_ts = trace_schedule(t_total, options.trace);
  std::size_t trace_pos = 0;

  std::vector<int> eval_ts = options.eval_ts;
  std::sort(eval_ts.begin(), eval_ts.end());
  if (!eval_ts.empty()) {
    if (!target)
      throw std::invalid_argument("run_sda: eval_ts requires a target");
    for (int t : eval_ts)
      if (t < 1 || t > t_total)
        throw std::invalid_argument("run_sda: eval time outside [1, t_total]");
  }

  SdaState main(n, dim);
  // The eval grid needs iterate sums over [floor(T/2), T) for every requested
  // T. Rather than storing prefix sums for the whole trajectory, replay the
  // same (pure) observation stream in a second state that trails at half
  // speed and read floor(T/2) prefixes off it as they are needed.
  std::optional<SdaState> shadow;
  if (!eval_ts.empty()) shadow.emplace(n, dim);
  std::size_t eval_pos = 0;

  Eigen::MatrixXd burn_acc = Eigen::MatrixXd::Zero(n, dim);
  SdaRun run;
  run.algorithm_tag = "sda";
  run.eval_mse.resize(eval_ts.size());

  for (int t = 0; t < t_total; ++t) {
    main.step(gossip, source, params);
    if (options.observer) options.observer(t, main.theta);
    if (target && trace_pos < trace_ts.size() && trace_ts[trace_pos] == t) {
      run.trace_ts.push_back(t);
      run.trace_sq_error.push_back(sum_sq_error(main.theta, *target));
      ++trace_pos;
    }
    if (t >= params.t_burn) burn_acc += main.theta;
    while (eval_pos < eval_ts.size() && eval_ts[eval_pos] == t + 1) {
      const int t_eval = eval_ts[eval_pos];
      while (shadow->steps < t_eval / 2) shadow->step(gossip, source, params);
      const Eigen::MatrixXd out =
          (main.prefix - shadow->prefix) / (t_eval - t_eval / 2);
      run.eval_mse[eval_pos] = sum_sq_error(out, *target);
      ++eval_pos;
    }
  }

  run.final_estimates = burn_acc / (t_total - params.t_burn);
  run.samples_used_per_node = params.samples_per_node();
  return run;
}

SdaRun run_sda(const GossipSpec& gossip, const ObservationModel& model,
               const SdaParams& params, std::uint64_t replication,
               const SdaOptions& options) {
  if (model.n_nodes != gossip.n())
    throw std::invalid_argument("run_sda: gossip and model disagree on n_nodes");
  const Eigen::VectorXd target = model.means.colwise().mean().transpose();
  return run_sda_source(gossip, model.dim, model_source(model, replication),
                        params, &target, options);
}

DsgRun run_dsg(const WeightMatrix& weights, const ObservationModel& model,
               int t_total, std::uint64_t replication,
               const DsgOptions& options) {
  if (t_total < 1) throw std::invalid_argument("run_dsg: t_total < 1");
  const int n = weights.n();
  if (model.n_nodes != n)
    throw std::invalid_argument("run_dsg: weights and model disagree on n_nodes");
  const int dim = model.dim;
  const Eigen::VectorXd target = model.means.colwise().mean().transpose();
  const auto source = model_source(model, replication);

  std::vector<int> eval_ts = options.eval_ts;
  std::sort(eval_ts.begin(), eval_ts.end());
  for (int t : eval_ts)
    if (t < 1 || t > t_total)
      throw std::invalid_argument("run_dsg: eval time outside [1, t_total]");

  const auto trace_ts = trace_schedule(t_total, options.trace);
  std::size_t trace_pos = 0;
  std::size_t eval_pos = 0;

  DsgRun run;
  run.algorithm_tag = "dsg";
  Eigen::MatrixXd state = Eigen::MatrixXd::Zero(n, dim);
  Eigen::MatrixXd local(n, dim);
  for (int t = 0; t < t_total; ++t) {
    const double step = 1.0 / (t + 1.0);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = source(i, t, 0);
      local.row(i) = state.row(i) + step * (r.transpose() - state.row(i));
    }
    state = weights.w * local;
    // trace indexes the state after t+1 mixing rounds
    if (trace_pos < trace_ts.size() && trace_ts[trace_pos] == t) {
      run.trace_ts.push_back(t + 1);
      run.trace_sq_error.push_back(sum_sq_error(state, target));
      ++trace_pos;
    }
    while (eval_pos < eval_ts.size() && eval_ts[eval_pos] == t + 1) {
      run.eval_mse.push_back(sum_sq_error(state, target));
      ++eval_pos;
    }
  }
  run.final_estimates = std::move(state);
  run.samples_used_per_node = t_total;
  return run;
}

RunResult run_dmasg(const WeightMatrix& shifted, const ObservationModel& model,
                    const DmasgParams& params, std::uint64_t replication,
                    const TraceOptions& trace) {
  params.validate();
  const int n = shifted.n();
  if (model.n_nodes != n)
    throw std::invalid_argument("run_dmasg: weights and model disagree on n_nodes");
  const int dim = model.dim;
  const int t_total = params.t_total();
  const Eigen::VectorXd target = model.means.colwise().mean().transpose();
  const auto source = model_source(model, replication);

  const auto trace_ts = trace_schedule(t_total, trace);
  std::size_t trace_pos = 0;

  RunResult run;
  run.algorithm_tag = "dmasg";
  Eigen::MatrixXd cur = Eigen::MatrixXd::Zero(n, dim);
  Eigen::MatrixXd prev = cur;
  Eigen::MatrixXd extrap(n, dim);
  Eigen::MatrixXd grad(n, dim);
  int t = 0;
  for (int stage = 0; stage < params.n_stages(); ++stage) {
    const double alpha = params.stage_steps[stage];
    const double beta = params.stage_momenta[stage];
    prev = cur;  // momentum restarts at each stage boundary
    for (int s = 0; s < params.stage_lengths[stage]; ++s, ++t) {
      extrap = cur + beta * (cur - prev);
      for (int i = 0; i < n; ++i)
        grad.row(i) = extrap.row(i) - source(i, t, 0).transpose();
      prev = cur;
      cur = shifted.w * extrap - alpha * grad;
      if (trace_pos < trace_ts.size() && trace_ts[trace_pos] == t) {
        run.trace_ts.push_back(t + 1);
        run.trace_sq_error.push_back(sum_sq_error(cur, target));
        ++trace_pos;
      }
    }
  }
  run.final_estimates = std::move(cur);
  run.samples_used_per_node = t_total;
  return run;
}

void write_trace_csv(std::ostream& out, const RunResult& run,
                     const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  out << "t,sum_sq_error\n";
  for (std::size_t i = 0; i < run.trace_ts.size(); ++i)
    out << run.trace_ts[i] << ',' << fmt17(run.trace_sq_error[i]) << '\n';
}

}  // namespace davg
