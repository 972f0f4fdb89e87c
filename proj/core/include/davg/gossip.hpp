#pragma once

#include <Eigen/Dense>
#include <ostream>

#include "davg/topology.hpp"

namespace davg {

struct EigenDecomposition {
  Eigen::VectorXd values;   // sorted descending
  Eigen::MatrixXd vectors;  // orthogonal, column i pairs with values(i)
};

// Dense symmetric eigendecomposition by cyclic Jacobi rotations. Deterministic:
// fixed sweep order, eigenvalues sorted descending, each eigenvector's first
// entry larger than 1e-12 in magnitude made positive. Throws if the input is
// not symmetric within 1e-10 or rotations fail to converge.
EigenDecomposition symmetric_eigendecomposition(const Eigen::MatrixXd& m);

/// Mixing matrix for the primal methods: symmetric, rows sum to one,
/// supported on the graph's edges plus the diagonal.
struct WeightMatrix {
  Eigen::MatrixXd w;
  Eigen::VectorXd eigs_desc_by_magnitude;  // lambda_(1)=1 first, then by |.|
  double kappa_w = 1.0;                    // 1 / (1 - |lambda_(2)|)

  int n() const { return static_cast<int>(w.rows()); }
};

WeightMatrix metropolis_hastings(const Topology& topology);

// 1/2 I + 1/2 W, with the spectrum recomputed. All eigenvalues end up positive.
WeightMatrix shifted_weights_dmasg(const WeightMatrix& wm);

/// Gossip matrix L = I - W with its full spectral data. One multiplication by
/// L is one communication round.
struct GossipSpec {
  Eigen::MatrixXd l;
  Eigen::VectorXd eigenvalues_desc;  // lambda_1 >= ... >= lambda_N = 0
  Eigen::MatrixXd eigenvectors;      // columns paired with eigenvalues_desc
  double kappa_l = 1.0;              // lambda_1 / lambda_{N-1}

  int n() const { return static_cast<int>(l.rows()); }
  double lambda_max() const { return eigenvalues_desc(0); }
  double lambda_min_nonzero() const {
    return n() > 1 ? eigenvalues_desc(n() - 2) : 0.0;
  }
  // sqrt(L) = Q sqrt(Lambda) Q^T; exposed for tests only.
  Eigen::MatrixXd sqrt_l() const;
};

GossipSpec gossip_from_weights(const WeightMatrix& wm);

// Row-major CSV with 17 significant digits, for cross-checks in other tools.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace davg
