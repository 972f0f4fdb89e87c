#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "davg/algorithms.hpp"
#include "davg/gossip.hpp"
#include "davg/topology.hpp"

namespace davg {

/// Sensor network estimating one parameter vector from per-sensor linear
/// measurements Y_{i,t} = A_i beta + eps_{i,t} with diagonal noise.
struct SensingInstance {
  int dim_d = 0;
  std::vector<Eigen::MatrixXd> sensor_matrices;  // A_i, each m_i x d
  Eigen::VectorXd beta_star;
  std::vector<Eigen::VectorXd> noise_stds;  // per-sensor, length m_i
  Eigen::MatrixXd a_bar;                    // (1/N) sum A_i^T A_i
  Eigen::MatrixXd mean_products;            // row i = A_i^T A_i beta_star

  int n_sensors() const { return static_cast<int>(sensor_matrices.size()); }
};

// Validates the distributed invertibility condition: the smallest eigenvalue
// of sum A_i^T A_i must exceed 1e-8 times the largest.
SensingInstance make_sensing_instance(std::vector<Eigen::MatrixXd> sensor_matrices,
                                      Eigen::VectorXd beta_star,
                                      std::vector<Eigen::VectorXd> noise_stds);

struct SensingResult {
  std::vector<Eigen::VectorXd> beta_hats;
  double sq_error_sum = 0.0;  // sum_i |beta_hat_i - beta_star|^2
  std::vector<Eigen::MatrixXd> a_hats;  // symmetrized per-node estimates of a_bar
  Eigen::MatrixXd mu_hats;              // row i = node i's estimate of mu_bar
};

// Two-phase pipeline: gossip the (deterministic) matrices A_i^T A_i without
// iterate averaging, then gossip the noisy products A_i^T Y_{i,t} with the
// theorem-driven parameters, and solve A_hat_i x = mu_hat_i per node.
// Throws if some |a_bar^-1| |A_hat_i - a_bar| exceeds 1/2 (t_matrix too small)
// or an A_hat_i is numerically singular.
SensingResult run_sensing(const SensingInstance& instance,
                          const GossipSpec& gossip, int t_matrix, int t_mean,
                          std::uint64_t seed);

SensingResult run_sensing(const SensingInstance& instance,
                          const TopologySpec& topology_spec, int t_matrix,
                          int t_mean, std::uint64_t seed);

/// Finite Markov reward process shared by all agents; each agent holds its
/// own reward function.
struct MrpInstance {
  int n_states = 0;
  Eigen::MatrixXd transition;   // n x n, row-stochastic
  Eigen::MatrixXd rewards;      // n_agents x n_states, row i = r_i
  Eigen::MatrixXd reward_stds;  // n_agents x n_states
  double gamma = 0.0;
  Eigen::VectorXd r_bar;
  Eigen::VectorXd j_star;  // (I - gamma P)^-1 r_bar

  int n_agents() const { return static_cast<int>(rewards.rows()); }
};

MrpInstance make_mrp_instance(Eigen::MatrixXd transition, Eigen::MatrixXd rewards,
                              Eigen::MatrixXd reward_stds, double gamma);

// Dense solve of the Bellman equation for an arbitrary reward vector.
Eigen::VectorXd bellman_solve(const Eigen::MatrixXd& transition, double gamma,
                              const Eigen::VectorXd& reward);

// J* of the instance, with the residual |(I-gamma P) J - r_bar| checked
// against 1e-10.
Eigen::VectorXd value_function(const MrpInstance& instance);

struct SampleTransitionMatrix {
  Eigen::MatrixXd p_hat;  // row-stochastic, entries are multiples of 1/t_samples
  int t_samples = 0;
};

// Generative-model estimate of P: per time step and state j, one next state
// drawn from P(j, .) keyed on (seed, t, j); rows of each draw are indicators.
SampleTransitionMatrix sample_transition(const MrpInstance& instance,
                                         int t_samples, std::uint64_t seed);

struct PolicyEvalOptions {
  bool use_exact_transition = false;  // plug in the true P instead of sampling
};

struct PolicyEvalResult {
  Eigen::MatrixXd j_hats;  // n_agents x n_states, row i = J_hat_i
  double max_sup_error = 0.0;
  Eigen::MatrixXd r_hats;  // n_agents x n_states
  Eigen::MatrixXd p_hat;
};

// Gossips the rewards with the theorem-driven parameters, samples P with the
// same number of steps, and plugs both into the Bellman equation per agent.
PolicyEvalResult run_policy_eval(const MrpInstance& instance,
                                 const GossipSpec& gossip, int t_total,
                                 std::uint64_t seed,
                                 const PolicyEvalOptions& options = {});

PolicyEvalResult run_policy_eval(const MrpInstance& instance,
                                 const TopologySpec& topology_spec, int t_total,
                                 std::uint64_t seed,
                                 const PolicyEvalOptions& options = {});

}  // namespace davg
