#include "davg/applications.hpp"

#include <cmath>
#include <stdexcept>

#include "davg/bounds.hpp"
#include "davg/csv.hpp"
#include "davg/rng.hpp"

namespace davg {

namespace {

GossipSpec gossip_for(const TopologySpec& spec) {
  return gossip_from_weights(metropolis_hastings(build_topology(spec)));
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

}  // namespace

SensingInstance make_sensing_instance(std::vector<Eigen::MatrixXd> sensor_matrices,
                                      Eigen::VectorXd beta_star,
                                      std::vector<Eigen::VectorXd> noise_stds) {
  if (sensor_matrices.empty())
    throw std::invalid_argument("make_sensing_instance: no sensors");
  const int n = static_cast<int>(sensor_matrices.size());
  const int d = static_cast<int>(beta_star.size());
  if (static_cast<int>(noise_stds.size()) != n)
    throw std::invalid_argument("make_sensing_instance: noise_stds size mismatch");

  SensingInstance inst;
  inst.dim_d = d;
  inst.beta_star = std::move(beta_star);
  inst.a_bar = Eigen::MatrixXd::Zero(d, d);
  inst.mean_products.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const auto& a = sensor_matrices[i];
    if (a.cols() != d)
      throw std::invalid_argument("make_sensing_instance: A_i column count != d");
    if (noise_stds[i].size() != a.rows())
      throw std::invalid_argument("make_sensing_instance: noise_stds[i] length != m_i");
    const Eigen::MatrixXd gram = a.transpose() * a;
    inst.a_bar += gram;
    inst.mean_products.row(i) = (gram * inst.beta_star).transpose();
  }
  const auto dec = symmetric_eigendecomposition(inst.a_bar);
  if (dec.values(d - 1) <= 1e-8 * dec.values(0))
    throw std::invalid_argument(
        "make_sensing_instance: sum A_i^T A_i is not invertible enough "
        "(eigenvalue ratio below 1e-8)");
  inst.a_bar /= n;
  inst.sensor_matrices = std::move(sensor_matrices);
  inst.noise_stds = std::move(noise_stds);
  return inst;
}

SensingResult run_sensing(const SensingInstance& instance,
                          const GossipSpec& gossip, int t_matrix, int t_mean,
                          std::uint64_t seed) {
  const int n = instance.n_sensors();
  const int d = instance.dim_d;
  if (gossip.n() != n)
    throw std::invalid_argument("run_sensing: gossip size != sensor count");
  if (t_matrix < 1 || t_mean < 2)
    throw std::invalid_argument("run_sensing: need t_matrix >= 1 and t_mean >= 2");

  // Phase 1: the observations are the constant matrices A_i^T A_i, flattened
  // to d^2 coordinates. No iterate averaging: take the last iterate.
  std::vector<Eigen::VectorXd> grams(n);
  for (int i = 0; i < n; ++i)
    grams[i] = flatten(instance.sensor_matrices[i].transpose() *
                       instance.sensor_matrices[i]);
  SdaParams phase1 = theorem1_params(gossip, std::max(t_matrix, 2));
  phase1.t_total = t_matrix;
  phase1.t_burn = t_matrix - 1;
  const SampleSource gram_source = [&grams](int node, int, int) {
    return grams[node];
  };
  const auto run1 =
      run_sda_source(gossip, d * d, gram_source, phase1, nullptr, {});

  SensingResult result;
  result.a_hats.reserve(n);
  const Eigen::MatrixXd a_bar_inv =
      Eigen::PartialPivLU<Eigen::MatrixXd>(instance.a_bar).inverse();
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd a_hat =
        unflatten(run1.final_estimates.row(i).transpose(), d, d);
    a_hat = 0.5 * (a_hat + a_hat.transpose());  // absorb round-off drift
    const double gap = spectral_norm(a_bar_inv) *
                       spectral_norm(a_hat - instance.a_bar);
    if (gap > 0.5) {
      throw std::runtime_error(
          "run_sensing: |a_bar^-1| |A_hat - a_bar| = " + fmt17(gap) +
          " > 1/2 at node " + std::to_string(i) +
          "; t_matrix is too small for the matrix phase to settle");
    }
    result.a_hats.push_back(std::move(a_hat));
  }

  // Phase 2: noisy products A_i^T (A_i beta + eps), Polyak-averaged.
  const SampleSource product_source = [&instance, seed](int node, int t, int draw) {
    const auto& a = instance.sensor_matrices[node];
    Eigen::VectorXd eps(a.rows());
    for (int row = 0; row < a.rows(); ++row) {
      const auto k = rng::key(seed, rng::Stream::SensingNoise,
                              {static_cast<std::uint64_t>(node),
                               static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(row),
                               static_cast<std::uint64_t>(draw)});
      eps(row) = instance.noise_stds[node](row) * rng::standard_normal(k);
    }
    return (a.transpose() * (a * instance.beta_star + eps)).eval();
  };
  const auto run2 = run_sda_source(gossip, d, product_source,
                                   theorem1_params(gossip, t_mean), nullptr, {});
  result.mu_hats = run2.final_estimates;

  result.beta_hats.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(result.a_hats[i]);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
      throw std::runtime_error("run_sensing: A_hat at node " + std::to_string(i) +
                               " is numerically singular (rcond=" + fmt17(rcond) + ")");
    }
    Eigen::VectorXd beta = lu.solve(result.mu_hats.row(i).transpose());
    result.sq_error_sum += (beta - instance.beta_star).squaredNorm();
    result.beta_hats.push_back(std::move(beta));
  }
  return result;
}

SensingResult run_sensing(const SensingInstance& instance,
                          const TopologySpec& topology_spec, int t_matrix,
                          int t_mean, std::uint64_t seed) {
  return run_sensing(instance, gossip_for(topology_spec), t_matrix, t_mean, seed);
}

MrpInstance make_mrp_instance(Eigen::MatrixXd transition, Eigen::MatrixXd rewards,
                              Eigen::MatrixXd reward_stds, double gamma) {
  const int n = static_cast<int>(transition.rows());
  if (transition.cols() != n || n < 1)
    throw std::invalid_argument("make_mrp_instance: transition must be square");
  if ((transition.array() < 0.0).any())
    throw std::invalid_argument("make_mrp_instance: negative transition entry");
  for (int j = 0; j < n; ++j) {
    if (std::abs(transition.row(j).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("make_mrp_instance: row " + std::to_string(j) +
                                  " of P does not sum to 1");
  }
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("make_mrp_instance: gamma must be in [0, 1)");
  if (rewards.cols() != n || reward_stds.rows() != rewards.rows() ||
      reward_stds.cols() != n)
    throw std::invalid_argument("make_mrp_instance: reward shape mismatch");

  MrpInstance inst;
  inst.n_states = n;
  inst.gamma = gamma;
  inst.r_bar = rewards.colwise().mean().transpose();
  inst.transition = std::move(transition);
  inst.rewards = std::move(rewards);
  inst.reward_stds = std::move(reward_stds);
  inst.j_star = bellman_solve(inst.transition, gamma, inst.r_bar);
  return inst;
}

Eigen::VectorXd bellman_solve(const Eigen::MatrixXd& transition, double gamma,
                              const Eigen::VectorXd& reward) {
  const int n = static_cast<int>(transition.rows());
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - gamma * transition;
  // I - gamma P is strictly diagonally dominant for gamma < 1, so the pivoted
  // LU cannot encounter a singular pivot here.
  return Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(reward);
}

Eigen::VectorXd value_function(const MrpInstance& instance) {
  Eigen::VectorXd j = bellman_solve(instance.transition, instance.gamma,
                                    instance.r_bar);
  const double residual =
      ((Eigen::MatrixXd::Identity(instance.n_states, instance.n_states) -
        instance.gamma * instance.transition) *
           j -
       instance.r_bar)
          .cwiseAbs()
          .maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("value_function: Bellman residual " +
                             fmt17(residual) + " exceeds 1e-10");
  return j;
}

SampleTransitionMatrix sample_transition(const MrpInstance& instance,
                                         int t_samples, std::uint64_t seed) {
  if (t_samples < 1)
    throw std::invalid_argument("sample_transition: t_samples < 1");
  const int n = instance.n_states;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < t_samples; ++t) {
    for (int j = 0; j < n; ++j) {
      const auto k = rng::key(seed, rng::Stream::MrpTransition,
                              {static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(j)});
      const double u = rng::uniform01(k);
      double acc = 0.0;
      int next = n - 1;
      for (int s = 0; s < n; ++s) {
        acc += instance.transition(j, s);
        if (u < acc) {
          next = s;
          break;
        }
      }
      counts(j, next) += 1.0;
    }
  }
  return {counts / static_cast<double>(t_samples), t_samples};
}

PolicyEvalResult run_policy_eval(const MrpInstance& instance,
                                 const GossipSpec& gossip, int t_total,
                                 std::uint64_t seed,
                                 const PolicyEvalOptions& options) {
  const int agents = instance.n_agents();
  if (gossip.n() != agents)
    throw std::invalid_argument("run_policy_eval: gossip size != agent count");

  ObservationModel rewards;
  rewards.n_nodes = agents;
  rewards.dim = instance.n_states;
  rewards.means = instance.rewards;
  rewards.std_devs = instance.reward_stds;
  rewards.master_seed = seed;
  SdaOptions opt;
  opt.trace.enabled = false;
  const auto run =
      run_sda(gossip, rewards, theorem1_params(gossip, t_total), 0, opt);

  PolicyEvalResult result;
  result.r_hats = run.final_estimates;
  result.p_hat = options.use_exact_transition
                     ? instance.transition
                     : sample_transition(instance, t_total, seed).p_hat;
  result.j_hats.resize(agents, instance.n_states);
  for (int i = 0; i < agents; ++i) {
    const Eigen::VectorXd j = bellman_solve(result.p_hat, instance.gamma,
                                            result.r_hats.row(i).transpose());
    result.j_hats.row(i) = j.transpose();
    result.max_sup_error =
        std::max(result.max_sup_error,
                 (j - instance.j_star).cwiseAbs().maxCoeff());
  }
  return result;
}

PolicyEvalResult run_policy_eval(const MrpInstance& instance,
                                 const TopologySpec& topology_spec, int t_total,
                                 std::uint64_t seed,
                                 const PolicyEvalOptions& options) {
  return run_policy_eval(instance, gossip_for(topology_spec), t_total, seed,
                         options);
}

}  // namespace davg
