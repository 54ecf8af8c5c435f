#include "sinkdir/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "sinkdir/rng.hpp"

namespace sinkdir {

void CostModelParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("cost model: a must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("cost model: b must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("cost model: gamma must be > 0");
}

ListenGraph::ListenGraph(NodeId sink, std::vector<std::vector<Link>> listen)
    : sink_(sink), listen_(std::move(listen)), listeners_(listen_.size()) {
  if (!listen_.empty() && sink_ >= listen_.size())
    throw std::invalid_argument("listen graph: sink id out of range");
  for (NodeId x = 0; x < listen_.size(); ++x)
    for (const Link& l : listen_[x]) listeners_[l.node].push_back({x, l.cost});
}

std::optional<double> ListenGraph::link(NodeId x, NodeId n) const {
  for (const Link& l : listen_[x])
    if (l.node == n) return l.cost;
  return std::nullopt;
}

std::size_t ListenGraph::max_in_degree() const {
  std::size_t best = 0;
  for (const auto& ls : listeners_) best = std::max(best, ls.size());
  return best;
}

std::optional<double> ListenGraph::min_positive_link() const {
  std::optional<double> best;
  for (const auto& list : listen_)
    for (const Link& l : list)
      if (l.cost > 0.0 && (!best || l.cost < *best)) best = l.cost;
  return best;
}

std::vector<Point> place_nodes(std::size_t n, double side, std::uint64_t seed) {
  if (!(side > 0.0)) throw std::invalid_argument("place_nodes: side must be > 0");
  Rng rng(seed);
  std::vector<Point> points(n);
  for (Point& p : points) {
    p.x = rng.uniform() * side;
    p.y = rng.uniform() * side;
  }
  return points;
}

double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

double link_cost(double r, const CostModelParams& params) {
  if (r == 0.0) return 0.0;
  return std::pow(r / params.a, params.gamma) * std::exp(r / params.b);
}

double link_cost(Point p, Point q, const CostModelParams& params) {
  return link_cost(distance(p, q), params);
}

namespace {

void check_graph_args(std::span<const Point> positions, double range, std::size_t k,
                      const CostModelParams& params, NodeId sink) {
  if (k == 0) throw std::invalid_argument("listen graph: k must be >= 1");
  if (!(range > 0.0)) throw std::invalid_argument("listen graph: range must be > 0");
  if (sink >= positions.size()) throw std::invalid_argument("listen graph: sink id out of range");
  params.validate();
}

bool cheaper(const Link& l, const Link& r) {
  return l.cost < r.cost || (l.cost == r.cost && l.node < r.node);
}

void keep_k_cheapest(std::vector<Link>& candidates, std::size_t k) {
  if (candidates.size() > k) {
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), cheaper);
    candidates.resize(k);
  } else {
    std::sort(candidates.begin(), candidates.end(), cheaper);
  }
}

// Uniform bucket grid over the bounding box, cell edge >= range, so every
// in-range neighbour of a point lies in its own or an adjacent cell.
class CellGrid {
 public:
  CellGrid(std::span<const Point> positions, double cell) : cell_(cell) {
    min_x_ = min_y_ = std::numeric_limits<double>::infinity();
    double max_x = -min_x_, max_y = -min_y_;
    for (const Point& p : positions) {
      min_x_ = std::min(min_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    if (positions.empty()) min_x_ = min_y_ = max_x = max_y = 0.0;
    cols_ = static_cast<std::size_t>((max_x - min_x_) / cell_) + 1;
    rows_ = static_cast<std::size_t>((max_y - min_y_) / cell_) + 1;
    start_.assign(cols_ * rows_ + 1, 0);
    for (const Point& p : positions) ++start_[index(p) + 1];
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    members_.resize(positions.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (NodeId id = 0; id < positions.size(); ++id) members_[fill[index(positions[id])]++] = id;
  }

  template <typename Visit>
  void for_each_near(Point p, Visit&& visit) const {
    const auto [cx, cy] = coords(p);
    for (std::size_t y = cy == 0 ? 0 : cy - 1; y <= std::min(cy + 1, rows_ - 1); ++y)
      for (std::size_t x = cx == 0 ? 0 : cx - 1; x <= std::min(cx + 1, cols_ - 1); ++x) {
        const std::size_t c = y * cols_ + x;
        for (std::size_t i = start_[c]; i < start_[c + 1]; ++i) visit(members_[i]);
      }
  }

 private:
  std::pair<std::size_t, std::size_t> coords(Point p) const {
    auto cx = static_cast<std::size_t>((p.x - min_x_) / cell_);
    auto cy = static_cast<std::size_t>((p.y - min_y_) / cell_);
    return {std::min(cx, cols_ - 1), std::min(cy, rows_ - 1)};
  }
  std::size_t index(Point p) const {
    const auto [cx, cy] = coords(p);
    return cy * cols_ + cx;
  }

  double cell_;
  double min_x_, min_y_;
  std::size_t cols_ = 1, rows_ = 1;
  std::vector<std::size_t> start_;
  std::vector<NodeId> members_;
};

bool interior(Point p, double range, double side) {
  return p.x > range && p.y > range && p.x < side - range && p.y < side - range;
}

}  // namespace

ListenGraph build_listen_graph(std::span<const Point> positions, double range, std::size_t k,
                               const CostModelParams& params, NodeId sink) {
  check_graph_args(positions, range, k, params, sink);
  const CellGrid grid(positions, range);
  std::vector<std::vector<Link>> listen(positions.size());
  const auto n = static_cast<std::int64_t>(positions.size());

#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto x = static_cast<NodeId>(i);
    std::vector<Link> candidates;
    grid.for_each_near(positions[x], [&](NodeId y) {
      if (y == x) return;
      const double r = distance(positions[x], positions[y]);
      if (r <= range) candidates.push_back({y, link_cost(r, params)});
    });
    keep_k_cheapest(candidates, k);
    listen[x] = std::move(candidates);
  }
  return ListenGraph(sink, std::move(listen));
}

ListenGraph build_listen_graph_serial(std::span<const Point> positions, double range,
                                      std::size_t k, const CostModelParams& params, NodeId sink) {
  check_graph_args(positions, range, k, params, sink);
  std::vector<std::vector<Link>> listen(positions.size());
  for (NodeId x = 0; x < positions.size(); ++x) {
    for (NodeId y = 0; y < positions.size(); ++y) {
      if (y == x) continue;
      const double r = distance(positions[x], positions[y]);
      if (r <= range) listen[x].push_back({y, link_cost(r, params)});
    }
    keep_k_cheapest(listen[x], k);
  }
  return ListenGraph(sink, std::move(listen));
}

std::vector<bool> reachable_set(const ListenGraph& graph) {
  std::vector<bool> reached(graph.size(), false);
  if (graph.size() == 0) return reached;
  std::vector<NodeId> frontier{graph.sink()};
  reached[graph.sink()] = true;
  while (!frontier.empty()) {
    const NodeId n = frontier.back();
    frontier.pop_back();
    // x can relay to n iff n is in x's listen list.
    for (const Link& l : graph.listeners(n)) {
      if (!reached[l.node]) {
        reached[l.node] = true;
        frontier.push_back(l.node);
      }
    }
  }
  return reached;
}

NodeId nearest_node(std::span<const Point> positions, Point target) {
  if (positions.empty()) throw std::invalid_argument("nearest_node: empty layout");
  NodeId best = 0;
  double best_d = distance(positions[0], target);
  for (NodeId id = 1; id < positions.size(); ++id) {
    const double d = distance(positions[id], target);
    if (d < best_d) {
      best = id;
      best_d = d;
    }
  }
  return best;
}

std::vector<std::pair<NodeId, NodeId>> coincident_pairs(std::span<const Point> positions) {
  std::vector<NodeId> order(positions.size());
  for (NodeId id = 0; id < order.size(); ++id) order[id] = id;
  std::sort(order.begin(), order.end(), [&](NodeId l, NodeId r) {
    const Point& a = positions[l];
    const Point& b = positions[r];
    return std::tie(a.x, a.y, l) < std::tie(b.x, b.y, r);
  });
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Point& a = positions[order[i]];
      const Point& b = positions[order[j]];
      if (a.x != b.x || a.y != b.y) break;
      pairs.emplace_back(std::min(order[i], order[j]), std::max(order[i], order[j]));
    }
  return pairs;
}

DegreeStats degree_stats(std::span<const Point> positions, double range, double side) {
  DegreeStats stats;
  if (positions.empty()) return stats;
  const CellGrid grid(positions, range);
  const auto n = static_cast<std::int64_t>(positions.size());
  std::uint64_t total = 0, total_interior = 0, interior_count = 0;

#pragma omp parallel for schedule(static) reduction(+ : total, total_interior, interior_count)
  for (std::int64_t i = 0; i < n; ++i) {
    const Point p = positions[static_cast<std::size_t>(i)];
    std::uint64_t degree = 0;
    grid.for_each_near(p, [&](NodeId y) {
      if (y != static_cast<NodeId>(i) && distance(p, positions[y]) <= range) ++degree;
    });
    total += degree;
    if (interior(p, range, side)) {
      total_interior += degree;
      ++interior_count;
    }
  }
  stats.mean_all = static_cast<double>(total) / static_cast<double>(n);
  stats.interior_count = interior_count;
  if (interior_count > 0)
    stats.mean_interior = static_cast<double>(total_interior) / static_cast<double>(interior_count);
  return stats;
}

DegreeStats degree_stats_serial(std::span<const Point> positions, double range, double side) {
  DegreeStats stats;
  if (positions.empty()) return stats;
  std::uint64_t total = 0, total_interior = 0;
  for (NodeId x = 0; x < positions.size(); ++x) {
    std::uint64_t degree = 0;
    for (NodeId y = 0; y < positions.size(); ++y)
      if (y != x && distance(positions[x], positions[y]) <= range) ++degree;
    total += degree;
    if (interior(positions[x], range, side)) {
      total_interior += degree;
      ++stats.interior_count;
    }
  }
  stats.mean_all = static_cast<double>(total) / static_cast<double>(positions.size());
  if (stats.interior_count > 0)
    stats.mean_interior =
        static_cast<double>(total_interior) / static_cast<double>(stats.interior_count);
  return stats;
}

void write_layout_csv(std::ostream& out, std::span<const Point> positions) {
  out << "id,x,y\n" << std::setprecision(17);
  for (NodeId id = 0; id < positions.size(); ++id)
    out << id << ',' << positions[id].x << ',' << positions[id].y << '\n';
}

std::vector<Point> read_layout_csv(std::istream& in) {
  std::string line;
  bool header = false;
  std::vector<Point> points;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "id,x,y") throw std::runtime_error("layout csv: expected header 'id,x,y'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string id_s, x_s, y_s;
    if (!std::getline(row, id_s, ',') || !std::getline(row, x_s, ',') || !std::getline(row, y_s))
      throw std::runtime_error("layout csv: malformed row at line " + std::to_string(line_no));
    try {
      if (std::stoull(id_s) != points.size())
        throw std::runtime_error("layout csv: ids must be 0..n-1 in order (line " +
                                 std::to_string(line_no) + ")");
      points.push_back({std::stod(x_s), std::stod(y_s)});
    } catch (const std::logic_error&) {
      throw std::runtime_error("layout csv: bad number at line " + std::to_string(line_no));
    }
  }
  if (!header) throw std::runtime_error("layout csv: missing header");
  return points;
}

}  // namespace sinkdir
