#include "davg/observation.hpp"

#include <stdexcept>

namespace davg {

Eigen::VectorXd ObservationModel::sample(int node, int t,
                                         std::uint64_t replication,
                                         int draw) const {
  if (node < 0 || node >= n_nodes)
    throw std::invalid_argument("ObservationModel::sample: node out of range");
  Eigen::VectorXd out(dim);
  for (int j = 0; j < dim; ++j) {
    const auto k = rng::key(master_seed, rng::Stream::Observation,
                            {replication, static_cast<std::uint64_t>(node),
                             static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(j),
                             static_cast<std::uint64_t>(draw)});
    out(j) = means(node, j) + std_devs(node, j) * rng::standard_normal(k);
  }
  return out;
}

ProblemInstance make_instance(ObservationModel model) {
  if (model.n_nodes <= 0 || model.dim <= 0)
    throw std::invalid_argument("make_instance: empty model");
  if (model.means.rows() != model.n_nodes || model.means.cols() != model.dim ||
      model.std_devs.rows() != model.n_nodes || model.std_devs.cols() != model.dim)
    throw std::invalid_argument("make_instance: means/std_devs shape mismatch");
  if ((model.std_devs.array() < 0.0).any())
    throw std::invalid_argument("make_instance: negative std_dev");
  ProblemInstance inst;
  inst.target = model.means.colwise().mean().transpose();
  inst.bias_energy =
      (model.means.rowwise() - inst.target.transpose()).squaredNorm();
  inst.model = std::move(model);
  return inst;
}

ProblemInstance uniform_means_instance(int n_nodes, int dim, double b,
                                       double sigma, std::uint64_t seed) {
  if (b < 0.0) throw std::invalid_argument("uniform_means_instance: b < 0");
  if (sigma < 0.0) throw std::invalid_argument("uniform_means_instance: sigma < 0");
  ObservationModel model;
  model.n_nodes = n_nodes;
  model.dim = dim;
  model.master_seed = seed;
  model.means.resize(n_nodes, dim);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < dim; ++j) {
      const auto k = rng::key(seed, rng::Stream::Means,
                              {static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j)});
      model.means(i, j) = b * rng::uniform01(k);
    }
  }
  model.std_devs = Eigen::MatrixXd::Constant(n_nodes, dim, sigma);
  return make_instance(std::move(model));
}

}  // namespace davg
