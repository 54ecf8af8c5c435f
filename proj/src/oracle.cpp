#include "sinkdir/oracle.hpp"

#include <functional>
#include <iomanip>
#include <ostream>
#include <queue>
#include <utility>

namespace sinkdir {

OptimalTree shortest_path_tree(const ListenGraph& graph) {
  const std::size_t n = graph.size();
  OptimalTree tree{std::vector<RouteCost>(n), std::vector<std::optional<NodeId>>(n)};
  if (n == 0) return tree;

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  std::vector<bool> settled(n, false);
  tree.cost[graph.sink()] = RouteCost::of(0.0);
  frontier.push({0.0, graph.sink()});

  while (!frontier.empty()) {
    const auto [dist, node] = frontier.top();
    frontier.pop();
    if (settled[node]) continue;
    settled[node] = true;
    for (const Link& l : graph.listeners(node)) {
      const NodeId x = l.node;
      if (settled[x]) continue;
      // Same operand order as the protocol's update, so equal paths give
      // bit-identical sums.
      const double candidate = l.cost + dist;
      const RouteCost current = tree.cost[x];
      if (candidate < current.or_infinity()) {
        tree.cost[x] = RouteCost::of(candidate);
        tree.parent[x] = node;
        frontier.push({candidate, x});
      } else if (candidate == current.or_infinity() && node < *tree.parent[x]) {
        tree.parent[x] = node;
      }
    }
  }
  return tree;
}

bool relaxation_check(const ListenGraph& graph, const OptimalTree& tree) {
  const std::size_t n = graph.size();
  if (tree.cost.size() != n || tree.parent.size() != n) return false;
  if (n == 0) return true;
  const NodeId sink = graph.sink();
  if (tree.cost[sink] != RouteCost::of(0.0) || tree.parent[sink]) return false;

  for (NodeId x = 0; x < n; ++x) {
    for (const Link& l : graph.listen_list(x)) {
      if (!tree.cost[l.node].reached()) continue;
      if (tree.cost[x].or_infinity() > l.cost + tree.cost[l.node].value()) return false;
    }
    if (x == sink) continue;
    const auto& parent = tree.parent[x];
    if (!tree.cost[x].reached()) {
      if (parent) return false;
      continue;
    }
    if (!parent) return false;
    const auto hop = graph.link(x, *parent);
    if (!hop || !tree.cost[*parent].reached()) return false;
    if (tree.cost[x].value() != *hop + tree.cost[*parent].value()) return false;
  }
  return true;
}

void write_tree_csv(std::ostream& out, const OptimalTree& tree) {
  out << "id,cost,parent\n" << std::setprecision(17);
  for (NodeId id = 0; id < tree.cost.size(); ++id) {
    out << id << ',';
    if (tree.cost[id].reached()) out << tree.cost[id].value();
    out << ',';
    if (tree.parent[id]) out << *tree.parent[id];
    out << '\n';
  }
}

}  // namespace sinkdir
