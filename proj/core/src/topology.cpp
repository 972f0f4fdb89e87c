#include "davg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "davg/rng.hpp"

namespace davg {

const char* graph_kind_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::Path: return "path";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::Star: return "star";
    case GraphKind::Grid: return "grid";
    case GraphKind::ErdosRenyi: return "erdos-renyi";
  }
  return "?";
}

std::vector<int> Topology::degrees() const {
  std::vector<int> deg(n_nodes, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

std::vector<std::vector<int>> Topology::adjacency() const {
  std::vector<std::vector<int>> adj(n_nodes);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

bool Topology::is_connected() const {
  if (n_nodes <= 0) return false;
  const auto adj = adjacency();
  std::vector<char> seen(n_nodes, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n_nodes;
}

std::string Topology::to_edge_list() const {
  std::ostringstream out;
  out << n_nodes << ' ' << edges.size() << '\n';
  for (auto [u, v] : edges) out << u + 1 << ' ' << v + 1 << '\n';
  return out.str();
}

namespace {

void add_edge(Topology& t, int u, int v) {
  if (u > v) std::swap(u, v);
  t.edges.emplace_back(u, v);
}

Topology finalize(Topology t) {
  std::sort(t.edges.begin(), t.edges.end());
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    auto [u, v] = t.edges[i];
    if (u == v) throw std::logic_error("topology: self-loop");
    if (i > 0 && t.edges[i] == t.edges[i - 1])
      throw std::logic_error("topology: duplicate edge");
  }
  if (!t.is_connected()) throw std::logic_error("topology: disconnected");
  return t;
}

}  // namespace

Topology build_path(int n) {
  if (n < 2) throw std::invalid_argument("build_path: n must be >= 2");
  Topology t{n, {}, GraphKind::Path, 0};
  for (int i = 0; i + 1 < n; ++i) add_edge(t, i, i + 1);
  return finalize(std::move(t));
}

Topology build_cycle(int n) {
  if (n < 3) throw std::invalid_argument("build_cycle: n must be >= 3");
  Topology t{n, {}, GraphKind::Cycle, 0};
  for (int i = 0; i < n; ++i) add_edge(t, i, (i + 1) % n);
  return finalize(std::move(t));
}

Topology build_star(int n) {
  if (n < 2) throw std::invalid_argument("build_star: n must be >= 2");
  Topology t{n, {}, GraphKind::Star, 0};
  for (int i = 1; i < n; ++i) add_edge(t, 0, i);
  return finalize(std::move(t));
}

Topology build_grid(int n) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (n < 4 || side * side != n)
    throw std::invalid_argument("build_grid: n must be a perfect square >= 4");
  Topology t{n, {}, GraphKind::Grid, 0};
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int i = r * side + c;
      if (c + 1 < side) add_edge(t, i, i + 1);
      if (r + 1 < side) add_edge(t, i, i + side);
    }
  }
  return finalize(std::move(t));
}

Topology build_erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("build_erdos_renyi: n must be >= 2");
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("build_erdos_renyi: p must be in (0, 1]");
  constexpr int kMaxRetries = 1000;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Topology t{n, {}, GraphKind::ErdosRenyi, s};
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const auto k = rng::key(s, rng::Stream::ErdosRenyi,
                                {static_cast<std::uint64_t>(u),
                                 static_cast<std::uint64_t>(v)});
        if (rng::uniform01(k) < p) t.edges.emplace_back(u, v);
      }
    }
    if (t.is_connected()) return finalize(std::move(t));
  }
  throw std::runtime_error(
      "build_erdos_renyi: no connected realization after 1000 retries");
}

Topology build_topology(const TopologySpec& spec) {
  switch (spec.kind) {
    case GraphKind::Path: return build_path(spec.n);
    case GraphKind::Cycle: return build_cycle(spec.n);
    case GraphKind::Star: return build_star(spec.n);
    case GraphKind::Grid: return build_grid(spec.n);
    case GraphKind::ErdosRenyi: return build_erdos_renyi(spec.n, spec.p, spec.seed);
  }
  throw std::invalid_argument("build_topology: unknown kind");
}

}  // namespace davg
