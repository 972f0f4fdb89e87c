#include "davg/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "davg/csv.hpp"

namespace davg {

namespace {

constexpr double kZeroEigTol = 1e-10;  // eigenvalues inside [-tol, tol] count as 0

// One cyclic Jacobi sweep: annihilate every off-diagonal (p,q) in row-major
// order. Rotation formulas follow the classical symmetric Schur decomposition.
double jacobi_sweep(Eigen::MatrixXd& a, Eigen::MatrixXd& q) {
  const int n = static_cast<int>(a.rows());
  for (int p = 0; p < n - 1; ++p) {
    for (int r = p + 1; r < n; ++r) {
      const double apr = a(p, r);
      if (apr == 0.0) continue;
      const double app = a(p, p);
      const double arr = a(r, r);
      const double tau = (arr - app) / (2.0 * apr);
      const double t = (tau >= 0.0)
                           ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                           : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      for (int k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akr = a(k, r);
        a(k, p) = c * akp - s * akr;
        a(k, r) = s * akp + c * akr;
      }
      for (int k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double ark = a(r, k);
        a(p, k) = c * apk - s * ark;
        a(r, k) = s * apk + c * ark;
      }
      for (int k = 0; k < n; ++k) {
        const double qkp = q(k, p);
        const double qkr = q(k, r);
        q(k, p) = c * qkp - s * qkr;
        q(k, r) = s * qkp + c * qkr;
      }
    }
  }
  double off = 0.0;
  for (int p = 0; p < n - 1; ++p)
    for (int r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
  return std::sqrt(2.0 * off);
}

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    for (int i = 0; i < vectors.rows(); ++i) {
      const double v = vectors(i, j);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) vectors.col(j) = -vectors.col(j);
        break;
      }
    }
  }
}

}  // namespace

EigenDecomposition symmetric_eigendecomposition(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("eigendecomposition: matrix not square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw std::invalid_argument("eigendecomposition: matrix not symmetric (max deviation " +
                                fmt17(asym) + ")");

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1.0);
  constexpr int kMaxSweeps = 64;
  bool converged = (n <= 1);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    const double off = jacobi_sweep(a, q);
    if (off <= 1e-12 * scale) converged = true;
  }
  if (!converged) {
    throw std::runtime_error(
        "eigendecomposition: Jacobi did not converge in 64 sweeps (n=" +
        std::to_string(n) + ", |A|_F=" + fmt17(a.norm()) + ")");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition dec;
  dec.values.resize(n);
  dec.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    dec.values(j) = a(order[j], order[j]);
    dec.vectors.col(j) = q.col(order[j]);
  }
  normalize_signs(dec.vectors);
  return dec;
}

WeightMatrix metropolis_hastings(const Topology& topology) {
  if (!topology.is_connected())
    throw std::invalid_argument("metropolis_hastings: topology must be connected");
  const int n = topology.n_nodes;
  const auto deg = topology.degrees();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : topology.edges) {
    const double x = 1.0 / (std::max(deg[u], deg[v]) + 1.0);
    w(u, v) = x;
    w(v, u) = x;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) off += w(i, j);
    w(i, i) = 1.0 - off;
  }

  WeightMatrix wm;
  wm.w = std::move(w);
  const auto dec = symmetric_eigendecomposition(wm.w);
  // Magnitude order with lambda_(1) = 1 first.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(dec.values(i)) > std::abs(dec.values(j));
  });
  wm.eigs_desc_by_magnitude.resize(n);
  for (int i = 0; i < n; ++i) wm.eigs_desc_by_magnitude(i) = dec.values(order[i]);
  wm.kappa_w = (n > 1) ? 1.0 / (1.0 - std::abs(wm.eigs_desc_by_magnitude(1))) : 1.0;
  return wm;
}

WeightMatrix shifted_weights_dmasg(const WeightMatrix& wm) {
  const int n = wm.n();
  WeightMatrix out;
  out.w = 0.5 * Eigen::MatrixXd::Identity(n, n) + 0.5 * wm.w;
  out.eigs_desc_by_magnitude =
      (0.5 * wm.eigs_desc_by_magnitude.array() + 0.5).matrix();
  // The affine map keeps magnitude order: all shifted eigenvalues are >= 0.
  std::sort(out.eigs_desc_by_magnitude.data(),
            out.eigs_desc_by_magnitude.data() + n, std::greater<double>());
  out.kappa_w = (n > 1) ? 1.0 / (1.0 - std::abs(out.eigs_desc_by_magnitude(1))) : 1.0;
  return out;
}

GossipSpec gossip_from_weights(const WeightMatrix& wm) {
  const int n = wm.n();
  GossipSpec g;
  g.l = Eigen::MatrixXd::Identity(n, n) - wm.w;
  if (n == 1) {
    // Single node: L = [0], nothing to gossip. kappa defaults to 1.
    g.eigenvalues_desc = Eigen::VectorXd::Zero(1);
    g.eigenvectors = Eigen::MatrixXd::Ones(1, 1);
    g.kappa_l = 1.0;
    return g;
  }
  auto dec = symmetric_eigendecomposition(g.l);
  for (int i = 0; i < n; ++i) {
    if (std::abs(dec.values(i)) <= kZeroEigTol) dec.values(i) = 0.0;
  }
  const double lambda_1 = dec.values(0);
  const double lambda_n1 = dec.values(n - 2);
  if (lambda_n1 <= 1e-12) {
    throw std::runtime_error(
        "gossip_from_weights: second-smallest eigenvalue " + fmt17(lambda_n1) +
        " is numerically zero; graph is effectively disconnected");
  }
  g.eigenvalues_desc = std::move(dec.values);
  g.eigenvectors = std::move(dec.vectors);
  g.kappa_l = lambda_1 / lambda_n1;
  return g;
}

Eigen::MatrixXd GossipSpec::sqrt_l() const {
  const Eigen::VectorXd root = eigenvalues_desc.cwiseMax(0.0).cwiseSqrt();
  return eigenvectors * root.asDiagonal() * eigenvectors.transpose();
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace davg
