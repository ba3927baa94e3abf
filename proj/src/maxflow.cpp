#include "maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace pace::detail {

std::size_t MaxFlow::add_edge(std::size_t from, std::size_t to, double capacity) {
  const std::size_t id = arcs_.size();
  arcs_.push_back({to, capacity, 0.0});
  adj_[from].push_back(id);
  arcs_.push_back({from, 0.0, 0.0});
  adj_[to].push_back(id + 1);
  return id;
}

bool MaxFlow::bfs(std::size_t source, std::size_t sink, double eps) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> q;
  level_[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t id : adj_[u]) {
      const Arc& a = arcs_[id];
      if (level_[a.to] < 0 && a.capacity - a.flow > eps) {
        level_[a.to] = level_[u] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double MaxFlow::dfs(std::size_t node, std::size_t sink, double pushed, double eps) {
  if (node == sink) return pushed;
  for (std::size_t& k = it_[node]; k < adj_[node].size(); ++k) {
    const std::size_t id = adj_[node][k];
    Arc& a = arcs_[id];
    if (level_[a.to] != level_[node] + 1 || a.capacity - a.flow <= eps) continue;
    const double got = dfs(a.to, sink, std::min(pushed, a.capacity - a.flow), eps);
    if (got > 0.0) {
      a.flow += got;
      arcs_[id ^ 1].flow -= got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::run(std::size_t source, std::size_t sink, double eps) {
  double total = 0.0;
  while (bfs(source, sink, eps)) {
    std::fill(it_.begin(), it_.end(), 0);
    while (true) {
      const double pushed = dfs(source, sink, std::numeric_limits<double>::infinity(), eps);
      if (pushed <= 0.0) break;
      total += pushed;
    }
  }
  return total;
}

}  // namespace pace::detail
