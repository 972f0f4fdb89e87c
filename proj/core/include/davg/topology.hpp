#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace davg {

enum class GraphKind { Path, Cycle, Star, Grid, ErdosRenyi };

const char* graph_kind_name(GraphKind kind);

/// Simple connected undirected graph over nodes 0..n_nodes-1.
/// Values are immutable once built and safe to share across workers.
struct Topology {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, sorted lexicographically
  GraphKind kind = GraphKind::Path;
  std::uint64_t seed = 0;  // Erdos-Renyi only: the seed that produced the realization

  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;
  bool is_connected() const;

  // Edge-list text format: "N M" then one "u v" line per edge, 1-based.
  std::string to_edge_list() const;
};

Topology build_path(int n);
Topology build_cycle(int n);
Topology build_star(int n);
Topology build_grid(int n);

// Includes each of the C(n,2) edges independently with probability p, keyed
// on the seed. Disconnected realizations advance the seed by one and retry;
// the seed actually used is recorded on the result.
Topology build_erdos_renyi(int n, double p, std::uint64_t seed);

struct TopologySpec {
  GraphKind kind = GraphKind::Path;
  int n = 0;
  double p = 0.0;           // ErdosRenyi only
  std::uint64_t seed = 0;   // ErdosRenyi only
};

Topology build_topology(const TopologySpec& spec);

}  // namespace davg
