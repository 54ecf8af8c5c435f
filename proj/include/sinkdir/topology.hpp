#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sinkdir {

using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Transmission cost model C(r) = (r/a)^gamma * exp(r/b).
struct CostModelParams {
  double a = 100.0;
  double b = 100.0;
  double gamma = 1.5;

  /// Throws std::invalid_argument unless a, b and gamma are all > 0.
  void validate() const;
};

/// Neighbour entry in a listen list: the neighbour and C(owner, neighbour).
struct Link {
  NodeId node;
  double cost;
  friend bool operator==(const Link&, const Link&) = default;
};

/// Directed listening graph after range and k-nearest restriction.
///
/// `listen_list(x)` holds the neighbours x listens to, ascending by cost with
/// ties on smaller id. `listeners(n)` is the reverse view: every x whose list
/// contains n, ascending by x, paired with C(x, n). A broadcast by n reaches
/// exactly `listeners(n)`.
class ListenGraph {
 public:
  ListenGraph() = default;
  ListenGraph(NodeId sink, std::vector<std::vector<Link>> listen);

  std::size_t size() const { return listen_.size(); }
  NodeId sink() const { return sink_; }

  std::span<const Link> listen_list(NodeId x) const { return listen_[x]; }
  std::span<const Link> listeners(NodeId n) const { return listeners_[n]; }

  /// C(x, n) when n is in x's listen list.
  std::optional<double> link(NodeId x, NodeId n) const;

  std::size_t max_in_degree() const;
  /// Smallest strictly positive link cost, or nullopt for an edgeless graph.
  std::optional<double> min_positive_link() const;

 private:
  NodeId sink_ = 0;
  std::vector<std::vector<Link>> listen_;
  std::vector<std::vector<Link>> listeners_;
};

/// n points uniform on [0, side]^2, deterministic in the seed.
std::vector<Point> place_nodes(std::size_t n, double side, std::uint64_t seed);

double distance(Point p, Point q);
double link_cost(double r, const CostModelParams& params);
double link_cost(Point p, Point q, const CostModelParams& params);

/// Range- and k-restricted listening graph. Cells of a uniform grid bound
/// the neighbour search and nodes are processed in parallel. Throws
/// std::invalid_argument for k == 0, range <= 0 or sink out of bounds.
ListenGraph build_listen_graph(std::span<const Point> positions, double range, std::size_t k,
                               const CostModelParams& params, NodeId sink);

/// Brute-force O(n^2) reference for build_listen_graph.
ListenGraph build_listen_graph_serial(std::span<const Point> positions, double range,
                                      std::size_t k, const CostModelParams& params, NodeId sink);

/// Membership mask of nodes with a directed relay path to the sink.
std::vector<bool> reachable_set(const ListenGraph& graph);

/// Node closest to `target` (smaller id on ties). Requires a non-empty layout.
NodeId nearest_node(std::span<const Point> positions, Point target);

/// Pairs of distinct nodes sharing a position (zero-cost links).
std::vector<std::pair<NodeId, NodeId>> coincident_pairs(std::span<const Point> positions);

/// Mean count of other nodes within `range`, over all nodes and over the
/// interior nodes lying further than `range` from every border of the square.
struct DegreeStats {
  double mean_all = 0.0;
  double mean_interior = 0.0;
  std::size_t interior_count = 0;
};

DegreeStats degree_stats(std::span<const Point> positions, double range, double side);
DegreeStats degree_stats_serial(std::span<const Point> positions, double range, double side);

/// Layout CSV: header `id,x,y`, one row per node in id order.
void write_layout_csv(std::ostream& out, std::span<const Point> positions);
/// Throws std::runtime_error on a malformed file or non-contiguous ids.
std::vector<Point> read_layout_csv(std::istream& in);

}  // namespace sinkdir
