#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sinkdir/route_cost.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

/// Exact shortest-path tree towards the sink over legal relay hops.
struct OptimalTree {
  std::vector<RouteCost> cost;
  std::vector<std::optional<NodeId>> parent;
};

/// Priority-first search from the sink over reversed listen edges: x may use
/// the hop x -> n with weight C(x, n) iff n is in x's listen list. Equal-cost
/// parents resolve to the smaller id.
OptimalTree shortest_path_tree(const ListenGraph& graph);

/// True iff no listen edge relaxes any cost and every finite cost is
/// witnessed exactly by its parent edge. O(n k).
bool relaxation_check(const ListenGraph& graph, const OptimalTree& tree);

/// CSV `id,cost,parent`; unreached cost and missing parent are empty fields.
void write_tree_csv(std::ostream& out, const OptimalTree& tree);

}  // namespace sinkdir
