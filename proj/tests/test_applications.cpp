#include <doctest.h>

#include <cmath>

#include "davg/applications.hpp"
#include "davg/bounds.hpp"
#include "davg/rng.hpp"

using namespace davg;

namespace {

Eigen::MatrixXd random_stochastic(int n, std::uint64_t seed) {
  Eigen::MatrixXd p(n, n);
  std::uint64_t c = 0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      p(i, j) = 0.05 + rng::uniform01(rng::key(seed, rng::Stream::Means, {c++}));
      row += p(i, j);
    }
    p.row(i) /= row;
  }
  // force exact unit row sums
  for (int i = 0; i < n; ++i) p(i, i) += 1.0 - p.row(i).sum();
  return p;
}

MrpInstance random_mrp(int n_agents, int n_states, double gamma, double sigma,
                       std::uint64_t seed) {
  Eigen::MatrixXd rewards(n_agents, n_states);
  std::uint64_t c = 1000000;
  for (int i = 0; i < n_agents; ++i)
    for (int j = 0; j < n_states; ++j)
      rewards(i, j) =
          2.0 * rng::uniform01(rng::key(seed, rng::Stream::Means, {c++})) - 1.0;
  return make_mrp_instance(random_stochastic(n_states, seed), rewards,
                           Eigen::MatrixXd::Constant(n_agents, n_states, sigma),
                           gamma);
}

}  // namespace

TEST_SUITE_BEGIN("applications");

TEST_CASE("value function of the lazy chain: geometric series") {
  // P = I, gamma = 1/2, unit rewards: J* = 1/(1-gamma) = 2 in every state
  const auto inst = make_mrp_instance(
      Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Ones(2, 3),
      Eigen::MatrixXd::Zero(2, 3), 0.5);
  CHECK((inst.j_star.array() - 2.0).abs().maxCoeff() < 1e-14);

  const auto zero = make_mrp_instance(
      Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(2, 3),
      Eigen::MatrixXd::Zero(2, 3), 0.9);
  CHECK(zero.j_star.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("value function residual stays below 1e-10 on random instances") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = random_mrp(4, 5, 0.9, 0.1, s);
    const Eigen::VectorXd j = value_function(inst);
    const Eigen::VectorXd residual =
        j - inst.gamma * inst.transition * j - inst.r_bar;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("three-state chain against a cofactor-inverse oracle") {
  Eigen::MatrixXd p(3, 3);
  p << 0.5, 0.5, 0.0,
       0.2, 0.3, 0.5,
       0.0, 0.4, 0.6;
  Eigen::MatrixXd rewards(2, 3);
  rewards << 1.0, 0.0, 2.0,
             3.0, 1.0, 0.0;
  const auto inst = make_mrp_instance(p, rewards, Eigen::MatrixXd::Zero(2, 3), 0.9);

  // independent route: explicit 3x3 inverse of I - gamma P via cofactors
  const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() - 0.9 * p;
  Eigen::Matrix3d adj;
  adj << m(1,1)*m(2,2) - m(1,2)*m(2,1), m(0,2)*m(2,1) - m(0,1)*m(2,2), m(0,1)*m(1,2) - m(0,2)*m(1,1),
         m(1,2)*m(2,0) - m(1,0)*m(2,2), m(0,0)*m(2,2) - m(0,2)*m(2,0), m(0,2)*m(1,0) - m(0,0)*m(1,2),
         m(1,0)*m(2,1) - m(1,1)*m(2,0), m(0,1)*m(2,0) - m(0,0)*m(2,1), m(0,0)*m(1,1) - m(0,1)*m(1,0);
  const double det = m(0,0)*adj(0,0) + m(0,1)*adj(1,0) + m(0,2)*adj(2,0);
  const Eigen::Vector3d expected = (adj / det) * inst.r_bar;
  CHECK((inst.j_star - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mrp validation rejects malformed inputs") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(0, 0) = 0.9;  // row sum 0.9
  CHECK_THROWS_AS(make_mrp_instance(bad, Eigen::MatrixXd::Ones(1, 3),
                                    Eigen::MatrixXd::Zero(1, 3), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_mrp_instance(Eigen::MatrixXd::Identity(3, 3),
                                    Eigen::MatrixXd::Ones(1, 3),
                                    Eigen::MatrixXd::Zero(1, 3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("sampled transitions: deterministic chains reproduce P exactly") {
  // a cyclic permutation has no sampling randomness at all
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) perm(i, (i + 1) % 4) = 1.0;
  const auto inst = make_mrp_instance(perm, Eigen::MatrixXd::Ones(2, 4),
                                      Eigen::MatrixXd::Zero(2, 4), 0.5);
  const auto sampled = sample_transition(inst, 13, 3);
  CHECK((sampled.p_hat - perm).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampled transitions are empirical frequencies") {
  const auto inst = random_mrp(2, 4, 0.9, 0.0, 17);
  const int t = 100000;
  const auto sampled = sample_transition(inst, t, 5);
  // Hoeffding-style envelope on every entry
  CHECK((sampled.p_hat - inst.transition).cwiseAbs().maxCoeff() <=
        4.0 * std::sqrt(std::log(4.0) / t));
  // rows sum to one and entries are multiples of 1/T
  for (int j = 0; j < 4; ++j)
    CHECK(sampled.p_hat.row(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 0; j < 4; ++j)
    for (int s = 0; s < 4; ++s) {
      const double scaled = sampled.p_hat(j, s) * t;
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-6);
    }
}

TEST_CASE("policy evaluation with gamma=0 returns the reward estimates") {
  const auto inst = random_mrp(6, 3, 0.0, 0.5, 2);
  const auto res = run_policy_eval(inst, TopologySpec{GraphKind::Cycle, 6}, 40, 9);
  CHECK((res.j_hats - res.r_hats).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exact plug-in recovers J* with no reward noise and equal rewards") {
  // identical rewards across agents: gossip is at its fixed point from t=0,
  // and a deterministic chain samples to P exactly
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(3, 3);
  perm(0, 1) = perm(1, 2) = perm(2, 0) = 1.0;
  Eigen::MatrixXd rewards(4, 3);
  rewards << 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3;
  const auto inst = make_mrp_instance(perm, rewards,
                                      Eigen::MatrixXd::Zero(4, 3), 0.9);
  const auto res = run_policy_eval(inst, TopologySpec{GraphKind::Star, 4}, 20, 1);
  CHECK(res.max_sup_error < 1e-12);
}

TEST_CASE("exact-transition plug-in converges to J* as the bias decays") {
  const auto inst = random_mrp(10, 10, 0.9, 0.0, 23);
  const auto res =
      run_policy_eval(inst, TopologySpec{GraphKind::Star, 10}, 600, 4,
                      {.use_exact_transition = true});
  CHECK(res.max_sup_error <= 1e-8);
}

TEST_CASE("sup-norm contraction of the plug-in resolvent") {
  const double gamma = 0.9;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::MatrixXd p = random_stochastic(6, 100 + s);
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i)
      v(i) = rng::standard_normal(rng::key(s, rng::Stream::Means, {(std::uint64_t)i}));
    const Eigen::VectorXd w = bellman_solve(p, gamma, v);
    CHECK(w.cwiseAbs().maxCoeff() <=
          v.cwiseAbs().maxCoeff() / (1.0 - gamma) * (1.0 + 1e-12));
  }
}

TEST_CASE("plug-in error decomposition holds on run intermediates") {
  const auto inst = random_mrp(5, 4, 0.85, 0.4, 31);
  const auto res = run_policy_eval(inst, TopologySpec{GraphKind::Path, 5}, 60, 12);
  const Eigen::VectorXd common =
      bellman_solve(res.p_hat, inst.gamma, inst.r_bar) - inst.j_star;
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd direct =
        res.j_hats.row(i).transpose() - inst.j_star;
    const Eigen::VectorXd reconstructed =
        bellman_solve(res.p_hat, inst.gamma,
                      res.r_hats.row(i).transpose() - inst.r_bar) +
        common;
    CHECK((direct - reconstructed).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("sensing validation rejects a rank-deficient sensor family") {
  std::vector<Eigen::MatrixXd> mats(3, Eigen::MatrixXd::Zero(1, 2));
  for (auto& m : mats) m(0, 0) = 1.0;  // nobody measures the second coordinate
  CHECK_THROWS_AS(make_sensing_instance(mats, Eigen::Vector2d(1, 2),
                                        std::vector<Eigen::VectorXd>(
                                            3, Eigen::VectorXd::Zero(1))),
                  std::invalid_argument);
}

TEST_CASE("single sensor with a square matrix is ordinary least squares") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 0, 1;
  const Eigen::Vector2d beta(1.5, -0.5);
  const auto inst = make_sensing_instance(
      {a}, beta, {Eigen::VectorXd::Zero(2)});
  GossipSpec trivial;
  trivial.l = Eigen::MatrixXd::Zero(1, 1);
  trivial.eigenvalues_desc = Eigen::VectorXd::Zero(1);
  trivial.eigenvectors = Eigen::MatrixXd::Ones(1, 1);
  trivial.kappa_l = 1.0;
  const auto res = run_sensing(inst, trivial, 1, 4, 3);
  CHECK((res.beta_hats[0] - beta).cwiseAbs().maxCoeff() < 1e-12);
  // equivalently beta = A^-1 (A beta)
  CHECK((res.beta_hats[0] - a.inverse() * (a * beta)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("identical identity sensors gossip nothing and lose nothing") {
  const int n = 6;
  std::vector<Eigen::MatrixXd> mats(n, Eigen::MatrixXd::Identity(2, 2));
  const Eigen::Vector2d beta(0.3, -1.1);
  const auto inst = make_sensing_instance(
      mats, beta, std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(2)));
  const auto res =
      run_sensing(inst, TopologySpec{GraphKind::Cycle, n}, 1, 10, 5);
  for (int i = 0; i < n; ++i) {
    CHECK((res.a_hats[i] - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((res.beta_hats[i] - res.mu_hats.row(i).transpose()).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((res.beta_hats[i] - beta).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("sensing error decomposition holds on run intermediates") {
  std::vector<Eigen::MatrixXd> mats;
  std::vector<Eigen::VectorXd> stds;
  std::uint64_t c = 0;
  for (int i = 0; i < 6; ++i) {
    Eigen::MatrixXd a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        a(r, s) = rng::standard_normal(rng::key(55, rng::Stream::Means, {c++}));
    a += 2.0 * Eigen::MatrixXd::Identity(3, 3);
    mats.push_back(a);
    stds.push_back(Eigen::VectorXd::Constant(3, 0.3));
  }
  const Eigen::Vector3d beta(1.0, -2.0, 0.5);
  const auto inst = make_sensing_instance(mats, beta, stds);
  const auto res =
      run_sensing(inst, TopologySpec{GraphKind::Cycle, 6}, 400, 200, 8);

  const Eigen::MatrixXd a_bar_inv = inst.a_bar.inverse();
  const Eigen::VectorXd mu_bar = inst.a_bar * beta;
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd mu_hat = res.mu_hats.row(i).transpose();
    const Eigen::VectorXd reconstructed =
        (res.a_hats[i].inverse() - a_bar_inv) * mu_hat +
        a_bar_inv * (mu_hat - mu_bar);
    const Eigen::VectorXd direct = res.beta_hats[i] - beta;
    CHECK((direct - reconstructed).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("an unsettled matrix phase is reported as a precondition failure") {
  // wildly different sensors on a path cannot agree in a single step
  std::vector<Eigen::MatrixXd> mats;
  std::vector<Eigen::VectorXd> stds;
  for (int i = 0; i < 5; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = (i == 0) ? 10.0 : 0.1;
    a(1, 1) = (i == 0) ? 0.1 : 10.0;
    mats.push_back(a);
    stds.push_back(Eigen::VectorXd::Zero(2));
  }
  const auto inst = make_sensing_instance(mats, Eigen::Vector2d(1, 1), stds);
  CHECK_THROWS_AS(
      run_sensing(inst, TopologySpec{GraphKind::Path, 5}, 1, 10, 2),
      std::runtime_error);
}

TEST_SUITE_END();
