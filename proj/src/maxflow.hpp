#pragma once

// Dinic max-flow over real capacities. Used by the equilibrium solver to route
// budgets across the tight agent-item edges.

#include <cstddef>
#include <vector>

namespace pace::detail {

class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), it_(nodes) {}

  /// Returns the index of the forward arc, usable with flow().
  std::size_t add_edge(std::size_t from, std::size_t to, double capacity);

  /// Residual capacities below `eps` count as saturated.
  double run(std::size_t source, std::size_t sink, double eps);

  double flow(std::size_t arc) const { return arcs_[arc].flow; }

 private:
  struct Arc {
    std::size_t to;
    double capacity;
    double flow;
  };

  bool bfs(std::size_t source, std::size_t sink, double eps);
  double dfs(std::size_t node, std::size_t sink, double pushed, double eps);

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace pace::detail
