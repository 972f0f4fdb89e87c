#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "davg/gossip.hpp"
#include "davg/observation.hpp"

namespace davg {

// (1 + k/(sqrt(kappa)+1)) (1 - 1/sqrt(kappa))^k -- the contraction envelope
// every dual-accelerated estimate lives under.
double acceleration_envelope(double kappa, int k);

/// Smallest k such that the envelope is dominated by (1 - 1/(2 sqrt(kappa)))^k
/// for every larger k. Found by exhaustive scan up to 3*ceil(sqrt(kappa))+50;
/// past that point the domination is guaranteed analytically.
struct KStar {
  double kappa = 1.0;
  int value = 1;
  bool cap_check = false;  // value <= 3 sqrt(kappa)
};

KStar compute_k_star(double kappa);

/// Evaluated closed-form error budget: a noise-free bias term plus two
/// noise-driven terms (one O(1/T^2), one O(1/T)).
struct BoundReport {
  double bias_term = 0.0;
  double variance_mid_term = 0.0;
  double variance_tail_term = 0.0;
  double total = 0.0;
  std::optional<double> empirical_mse;
  bool burn_in_warning = false;  // T odd, or T/2 below k*
};

// Raw arithmetic behind the dual-method bound; exposed so the three terms can
// be pinned in tests without building a graph.
BoundReport sda_bound_terms(double kappa, int k_star, int t_total,
                            double bias_energy, double total_variance,
                            double max_variance_per_coord_sum);

BoundReport sda_upper_bound(const GossipSpec& gossip,
                            const ProblemInstance& instance, int t_total);

BoundReport dsg_upper_bound(const WeightMatrix& weights,
                            const ProblemInstance& instance, int t_total);

// Bound terms per iteration count, optionally with the measured error filled
// in, for overlay plots against empirical traces.
void write_bound_report_csv(std::ostream& out,
                            const std::vector<std::pair<int, BoundReport>>& rows,
                            const std::vector<std::string>& header_comments);

/// Linear-system form of one dual-accelerated iteration on the centered
/// state (U, V): [U';V'] = A [U;V] - eta B omega. Used as an independent
/// oracle for the iteration code.
struct RecursionOracle {
  Eigen::MatrixXd a;  // 2N x 2N
  Eigen::MatrixXd b;  // 2N x N
  double eta = 0.0;
  double zeta = 0.0;
  Eigen::MatrixXd l;
};

RecursionOracle make_recursion_oracle(const Eigen::MatrixXd& l, double eta,
                                      double zeta);

std::pair<Eigen::VectorXd, Eigen::VectorXd> oracle_step(
    const RecursionOracle& oracle, const Eigen::VectorXd& u,
    const Eigen::VectorXd& v, const Eigen::VectorXd& omega);

// 2x2 block of the iteration acting on one eigen-direction of L, with
// eta*lambda_i expressed as the ratio lambda_i/lambda_1 in [1/kappa, 1].
Eigen::Matrix2d acceleration_block(double kappa, double lambda_ratio);

/// Checks |[A(lambda_i)^k]_{1,1}| <= envelope(kappa, k) for all k <= k_max by
/// explicit matrix powers. first_violation_k is -1 when every k passes.
struct EntryBoundCheck {
  bool ok = true;
  int first_violation_k = -1;
};

EntryBoundCheck lemma2_entry_bound_check(double kappa, double lambda_ratio,
                                         int k_max);

// Operator 2-norm via eigendecomposition of M^T M.
double spectral_norm(const Eigen::MatrixXd& m);

}  // namespace davg
