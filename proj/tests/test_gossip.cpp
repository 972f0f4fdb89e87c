#include <doctest.h>

#include <cmath>
#include <sstream>

#include "davg/gossip.hpp"
#include "davg/rng.hpp"

using namespace davg;

namespace {

Eigen::MatrixXd random_symmetric_from_spectrum(const Eigen::VectorXd& lambda,
                                               std::uint64_t seed,
                                               Eigen::MatrixXd* q_out) {
  const int n = static_cast<int>(lambda.size());
  Eigen::MatrixXd g(n, n);
  std::uint64_t c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = rng::standard_normal(rng::key(seed, rng::Stream::Means, {c++}));
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  if (q_out) *q_out = q;
  return q * lambda.asDiagonal() * q.transpose();
}

std::vector<Topology> five_topologies() {
  return {build_path(12), build_cycle(12), build_star(12), build_grid(16),
          build_erdos_renyi(12, 0.4, 5)};
}

}  // namespace

TEST_SUITE_BEGIN("gossip");

TEST_CASE("metropolis-hastings weights on the 3-node path") {
  const auto wm = metropolis_hastings(build_path(3));
  Eigen::Matrix3d expected;
  expected << 2.0 / 3, 1.0 / 3, 0.0,
              1.0 / 3, 1.0 / 3, 1.0 / 3,
              0.0, 1.0 / 3, 2.0 / 3;
  CHECK((wm.w - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("metropolis-hastings weights on the 3-node star") {
  const auto wm = metropolis_hastings(build_star(3));
  CHECK(wm.w(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(wm.w(0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(wm.w(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(wm.w(1, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(wm.w(2, 2) == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("weight matrices are symmetric with unit row sums") {
  for (const auto& t : five_topologies()) {
    const auto wm = metropolis_hastings(t);
    CHECK((wm.w - wm.w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd rows = wm.w.rowwise().sum();
    CHECK((rows.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(wm.eigs_desc_by_magnitude(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(wm.eigs_desc_by_magnitude(1)) < 1.0);
  }
}

TEST_CASE("gossip matrices satisfy the structural conditions") {
  for (const auto& t : five_topologies()) {
    const auto wm = metropolis_hastings(t);
    const auto g = gossip_from_weights(wm);
    const int n = g.n();
    CHECK((g.l * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(g.eigenvalues_desc.minCoeff() >= -1e-10);
    CHECK(g.eigenvalues_desc(n - 1) == 0.0);

    // sparsity: support of L inside adjacency + diagonal
    const auto adj = t.adjacency();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || g.l(i, j) == 0.0) continue;
        const bool neighbor =
            std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end();
        CHECK(neighbor);
      }
    }

    const Eigen::MatrixXd rebuilt = g.eigenvectors *
                                    g.eigenvalues_desc.asDiagonal() *
                                    g.eigenvectors.transpose();
    CHECK((rebuilt - g.l).norm() <= 1e-8 * g.l.norm());
  }
}

TEST_CASE("eigendecomposition of simple matrices") {
  Eigen::Matrix3d d = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const auto dec = symmetric_eigendecomposition(d);
  CHECK(dec.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(dec.values(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dec.values(2) == doctest::Approx(1.0).epsilon(1e-14));
  // signed permutation: one unit entry per column
  for (int j = 0; j < 3; ++j) {
    CHECK(dec.vectors.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK(dec.vectors.col(j).cwiseAbs().sum() == doctest::Approx(1.0));
  }

  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  const auto dec2 = symmetric_eigendecomposition(swap);
  CHECK(dec2.values(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dec2.values(1) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("random 50x50 spectrum is recovered from a known construction") {
  Eigen::VectorXd lambda(50);
  for (int i = 0; i < 50; ++i)
    lambda(i) = 10.0 - 0.4 * i;  // distinct, descending
  const Eigen::MatrixXd m = random_symmetric_from_spectrum(lambda, 99, nullptr);
  const auto dec = symmetric_eigendecomposition(m);
  CHECK((dec.values - lambda).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd rebuilt =
      dec.vectors * dec.values.asDiagonal() * dec.vectors.transpose();
  CHECK((rebuilt - m).norm() <= 1e-8 * m.norm());
  CHECK((dec.vectors * dec.vectors.transpose() -
         Eigen::MatrixXd::Identity(50, 50)).norm() < 1e-8);
}

TEST_CASE("eigendecomposition is deterministic and rejects asymmetry") {
  const auto wm = metropolis_hastings(build_grid(25));
  const auto a = symmetric_eigendecomposition(wm.w);
  const auto b = symmetric_eigendecomposition(wm.w);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);

  Eigen::Matrix2d bad;
  bad << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(symmetric_eigendecomposition(bad), std::invalid_argument);
}

TEST_CASE("kappa is invariant under scaling of the gossip matrix") {
  const auto g = gossip_from_weights(metropolis_hastings(build_star(10)));
  const auto dec = symmetric_eigendecomposition(3.7 * g.l);
  const double scaled_kappa = dec.values(0) / dec.values(g.n() - 2);
  CHECK(std::abs(scaled_kappa - g.kappa_l) <= 1e-10 * g.kappa_l);
}

TEST_CASE("star kappa equals the node count") {
  const auto g = gossip_from_weights(metropolis_hastings(build_star(100)));
  CHECK(g.kappa_l == doctest::Approx(100.0).epsilon(0.05));
  CHECK(g.lambda_max() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-node graph degenerates to kappa 1") {
  const auto g = gossip_from_weights(metropolis_hastings(build_path(2)));
  CHECK(g.kappa_l == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shifted weights move the spectrum by the affine map") {
  const auto wm = metropolis_hastings(build_path(3));
  const auto shifted = shifted_weights_dmasg(wm);
  // 3-node path by hand: W has eigenvalues {1, 2/3, 0}, so the shifted
  // matrix has {1, 5/6, 1/2}.
  CHECK(shifted.eigs_desc_by_magnitude(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(shifted.eigs_desc_by_magnitude(1) == doctest::Approx(5.0 / 6).epsilon(1e-12));
  CHECK(shifted.eigs_desc_by_magnitude(2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(shifted.eigs_desc_by_magnitude.minCoeff() > 0.0);

  WeightMatrix identity;
  identity.w = Eigen::MatrixXd::Identity(4, 4);
  identity.eigs_desc_by_magnitude = Eigen::VectorXd::Ones(4);
  identity.kappa_w = 1.0;
  const auto still = shifted_weights_dmasg(identity);
  CHECK((still.w - identity.w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effectively disconnected weights are rejected") {
  // block-diagonal mixing matrix of two separate pairs
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w.topLeftCorner(2, 2).setConstant(0.5);
  w.bottomRightCorner(2, 2).setConstant(0.5);
  WeightMatrix wm;
  wm.w = w;
  wm.eigs_desc_by_magnitude = Eigen::VectorXd::Zero(4);
  wm.kappa_w = 1.0;
  CHECK_THROWS_AS(gossip_from_weights(wm), std::runtime_error);
}

TEST_CASE("matrix csv export uses 17 significant digits") {
  Eigen::MatrixXd m(1, 2);
  m << 1.0 / 3.0, 2.0;
  std::ostringstream out;
  write_matrix_csv(m, out);
  CHECK(out.str() == "0.33333333333333331,2\n");
}

TEST_SUITE_END();
