#include "davg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "davg/csv.hpp"

namespace davg {

double acceleration_envelope(double kappa, int k) {
  const double rk = std::sqrt(kappa);
  return (1.0 + k / (rk + 1.0)) * std::pow(1.0 - 1.0 / rk, k);
}

KStar compute_k_star(double kappa) {
  if (kappa < 1.0) throw std::invalid_argument("compute_k_star: kappa < 1");
  KStar out;
  out.kappa = kappa;
  const double rk = std::sqrt(kappa);
  const int cap = 3 * static_cast<int>(std::ceil(rk)) + 50;
  int last_violation = 0;
  for (int k = 1; k <= cap; ++k) {
    const double lhs = acceleration_envelope(kappa, k);
    const double rhs = std::pow(1.0 - 1.0 / (2.0 * rk), k);
    if (lhs > rhs) last_violation = k;
  }
  out.value = last_violation + 1;
  out.cap_check = out.value <= 3.0 * rk;
  return out;
}

BoundReport sda_bound_terms(double kappa, int k_star, int t_total,
                            double bias_energy, double total_variance,
                            double max_variance_per_coord_sum) {
  if (t_total < 1) throw std::invalid_argument("sda_bound_terms: t_total < 1");
  const double t = static_cast<double>(t_total);
  const double rk = std::sqrt(kappa);
  BoundReport r;
  r.bias_term = 16.0 * kappa / (t * t) * std::exp(-t / (2.0 * rk)) * bias_energy;
  r.variance_mid_term = 24.0 * (k_star + rk) * total_variance / (t * t);
  r.variance_tail_term = 2.0 * max_variance_per_coord_sum / t;
  r.total = r.bias_term + r.variance_mid_term + r.variance_tail_term;
  r.burn_in_warning = (t_total % 2 != 0) || (t_total / 2 < k_star);
  return r;
}

BoundReport sda_upper_bound(const GossipSpec& gossip,
                            const ProblemInstance& instance, int t_total) {
  const auto& sd = instance.model.std_devs;
  const double total_variance = sd.array().square().sum();
  // sum over coordinates of the worst per-node variance
  const double max_var_sum = sd.array().square().colwise().maxCoeff().sum();
  const KStar ks = compute_k_star(gossip.kappa_l);
  return sda_bound_terms(gossip.kappa_l, ks.value, t_total,
                         instance.bias_energy, total_variance, max_var_sum);
}

BoundReport dsg_upper_bound(const WeightMatrix& weights,
                            const ProblemInstance& instance, int t_total) {
  if (t_total < 1) throw std::invalid_argument("dsg_upper_bound: t_total < 1");
  const int n = weights.n();
  const int dim = instance.model.dim;
  const double t = static_cast<double>(t_total);
  const Eigen::MatrixXd var = instance.model.std_devs.array().square();

  BoundReport r;
  r.bias_term = 2.0 * weights.kappa_w * weights.kappa_w *
                instance.model.means.squaredNorm() / (t * t);

  // Per coordinate, the variances enter in decreasing order, paired with the
  // magnitude-ordered spectrum starting at lambda_(2).
  Eigen::MatrixXd var_sorted = var;
  for (int s = 0; s < dim; ++s)
    std::sort(var_sorted.col(s).data(), var_sorted.col(s).data() + n,
              std::greater<double>());
  double mid = 0.0;
  for (int i = 1; i < n; ++i) {
    const double lam = std::abs(weights.eigs_desc_by_magnitude(i));
    mid += var_sorted.row(i - 1).sum() / (1.0 - lam * lam);
  }
  r.variance_mid_term = 2.0 * mid / (t * t);
  r.variance_tail_term = 2.0 * var.sum() / (n * t);
  r.total = r.bias_term + r.variance_mid_term + r.variance_tail_term;
  return r;
}

RecursionOracle make_recursion_oracle(const Eigen::MatrixXd& l, double eta,
                                      double zeta) {
  const int n = static_cast<int>(l.rows());
  RecursionOracle o;
  o.eta = eta;
  o.zeta = zeta;
  o.l = l;
  o.a.setZero(2 * n, 2 * n);
  o.a.topLeftCorner(n, n) =
      Eigen::MatrixXd::Identity(n, n) - eta * (1.0 + zeta) * l;
  o.a.topRightCorner(n, n) = zeta * zeta * Eigen::MatrixXd::Identity(n, n);
  o.a.bottomLeftCorner(n, n) = -eta * l;
  o.a.bottomRightCorner(n, n) = zeta * Eigen::MatrixXd::Identity(n, n);
  o.b.setZero(2 * n, n);
  o.b.topRows(n) = (1.0 + zeta) * l;
  o.b.bottomRows(n) = l;
  return o;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> oracle_step(
    const RecursionOracle& oracle, const Eigen::VectorXd& u,
    const Eigen::VectorXd& v, const Eigen::VectorXd& omega) {
  const int n = static_cast<int>(oracle.l.rows());
  if (u.size() != n || v.size() != n || omega.size() != n)
    throw std::invalid_argument("oracle_step: dimension mismatch");
  Eigen::VectorXd state(2 * n);
  state << u, v;
  const Eigen::VectorXd next = oracle.a * state - oracle.eta * (oracle.b * omega);
  return {next.head(n), next.tail(n)};
}

Eigen::Matrix2d acceleration_block(double kappa, double lambda_ratio) {
  const double rk = std::sqrt(kappa);
  const double zeta = (rk - 1.0) / (rk + 1.0);
  Eigen::Matrix2d a;
  a << 1.0 - (1.0 + zeta) * lambda_ratio, zeta * zeta,
       -lambda_ratio, zeta;
  return a;
}

EntryBoundCheck lemma2_entry_bound_check(double kappa, double lambda_ratio,
                                         int k_max) {
  if (kappa < 1.0)
    throw std::invalid_argument("lemma2_entry_bound_check: kappa < 1");
  if (lambda_ratio < 1.0 / kappa - 1e-12 || lambda_ratio > 1.0 + 1e-12)
    throw std::invalid_argument(
        "lemma2_entry_bound_check: lambda ratio outside [1/kappa, 1]");
  const Eigen::Matrix2d a = acceleration_block(kappa, lambda_ratio);
  Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
  EntryBoundCheck check;
  for (int k = 0; k <= k_max; ++k) {
    const double bound = acceleration_envelope(kappa, k);
    // tiny relative slack absorbs the roundoff of repeated multiplication
    if (std::abs(power(0, 0)) > bound * (1.0 + 1e-9) + 1e-15) {
      check.ok = false;
      check.first_violation_k = k;
      return check;
    }
    power = power * a;
  }
  return check;
}

void write_bound_report_csv(std::ostream& out,
                            const std::vector<std::pair<int, BoundReport>>& rows,
                            const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) out << "# " << c << '\n';
  out << "t,bias,variance_mid,variance_tail,total,empirical_mse\n";
  for (const auto& [t, r] : rows) {
    out << t << ',' << fmt17(r.bias_term) << ',' << fmt17(r.variance_mid_term)
        << ',' << fmt17(r.variance_tail_term) << ',' << fmt17(r.total) << ',';
    if (r.empirical_mse) out << fmt17(*r.empirical_mse);
    out << '\n';
  }
}

double spectral_norm(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  const auto dec = symmetric_eigendecomposition(gram);
  return std::sqrt(std::max(0.0, dec.values(0)));
}

}  // namespace davg
