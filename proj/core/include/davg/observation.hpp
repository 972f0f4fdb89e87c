#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "davg/rng.hpp"

namespace davg {

enum class NoiseKind { Gaussian };

/// Per-node observation distributions. Each draw is a pure function of
/// (master_seed, replication, node, t, coordinate, batch index), so parallel
/// replications never share state.
struct ObservationModel {
  int n_nodes = 0;
  int dim = 0;
  Eigen::MatrixXd means;     // n_nodes x dim
  Eigen::MatrixXd std_devs;  // n_nodes x dim, entrywise >= 0
  NoiseKind distribution = NoiseKind::Gaussian;
  std::uint64_t master_seed = 0;

  Eigen::VectorXd sample(int node, int t, std::uint64_t replication,
                         int draw = 0) const;
};

struct ProblemInstance {
  ObservationModel model;
  Eigen::VectorXd target;   // column mean of model.means
  double bias_energy = 0.0; // sum_i |mu_i - target|^2
};

ProblemInstance make_instance(ObservationModel model);

// Means drawn iid Uniform[0, b]; every sigma_{i,j} = sigma.
ProblemInstance uniform_means_instance(int n_nodes, int dim, double b,
                                       double sigma, std::uint64_t seed);

}  // namespace davg
