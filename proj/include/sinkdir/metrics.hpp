#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sinkdir/engine.hpp"
#include "sinkdir/oracle.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

/// Half-open bins [edges[i], edges[i+1]); samples below the first edge go to
/// underflow, samples at or above the last edge to overflow.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  std::uint64_t total() const;
  /// Lower edge of the most populated bin (first one on ties).
  std::optional<double> mode() const;
};

/// Throws std::invalid_argument unless edges has >= 2 strictly ascending entries.
Histogram make_histogram(std::span<const double> samples, std::vector<double> edges);
/// Unit-width integer bins 0, 1, ..., max_value.
std::vector<double> integer_edges(std::uint64_t max_value);
/// `bins` equal-width bins spanning [lo, hi] (hi nudged up so max lands inside).
std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

/// Trailing window mean, partial at the start; length preserved.
/// Throws std::invalid_argument for window == 0.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// Per-node messages_sent over every node (sink included). Default edges are
/// integer bins up to the largest count.
Histogram message_histogram(const RunResult& result,
                            std::optional<std::vector<double>> edges = std::nullopt);

struct NodePath {
  RouteCost cost;
  /// Pointer-chain length to the sink (0 for the sink); unset if unreached.
  std::optional<std::uint32_t> hops;
};

struct PathStats {
  std::vector<NodePath> nodes;
  Histogram cost_hist;
  /// Raw chain length per reached node.
  Histogram hops_hist;
  /// Intermediate relays per reached non-sink node: chain length - 1.
  Histogram intermediate_hist;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Follows every reached node's pointer chain. Throws InvariantError on a
/// cycle or a chain that ends anywhere but the sink.
PathStats path_stats(const RunResult& result, const ListenGraph& graph,
                     std::size_t cost_bins = 50);

/// Scalar reductions of one run. Means run over reached nodes; the sink
/// counts as a sender with its single bootstrap message.
struct RunSummary {
  std::size_t nodes = 0;
  std::size_t reached = 0;
  std::size_t unreached = 0;
  std::uint64_t total_messages = 0;
  double mean_messages = 0.0;
  double mean_cost = 0.0;
  double mean_hops = 0.0;
  /// Mean protocol/oracle cost over reached non-sink nodes (needs an oracle).
  std::optional<double> mean_cost_ratio;
  std::optional<double> min_cost_ratio;
  TimeStep converged_at = 0;
};

RunSummary summarize(const RunResult& result, const ListenGraph& graph,
                     const OptimalTree* oracle = nullptr);

struct SweepRow {
  std::size_t k = 0;
  double f = 1.0;
  double mean_messages = 0.0;
  double mean_cost = 0.0;
  double mean_hops = 0.0;
  double mean_cost_ratio = 0.0;
  double unreached = 0.0;
  double converged_at = 0.0;
  std::size_t seeds = 0;
  /// Seeds whose listen graph leaves more than 1% of nodes unreachable.
  std::size_t disconnected = 0;
  /// Seeds that hit the safety horizon; excluded from the means.
  std::size_t livelocked = 0;
};

using SweepTable = std::vector<SweepRow>;

/// One layout and run seed per replicate. Layouts are shared across all
/// (k, f) cells of a replicate so the grid isolates the effect of k and f.
struct SweepReplicate {
  std::vector<Point> positions;
  NodeId sink = 0;
  std::uint64_t seed = 0;
};

struct SweepSpec {
  double range = 300.0;
  CostModelParams cost;
  ProtocolConfig protocol;
  std::vector<double> f_values;
  std::vector<std::size_t> k_values;
  RunOptions options;
  /// Worker threads; 0 uses the OpenMP default.
  int workers = 0;
};

/// Rows ordered by (k, f) as listed in the spec; cells run concurrently.
SweepTable sweep(std::span<const SweepReplicate> replicates, const SweepSpec& spec);
/// Same result computed cell by cell on the calling thread.
SweepTable sweep_serial(std::span<const SweepReplicate> replicates, const SweepSpec& spec);

void write_timeseries_csv(std::ostream& out, const RunResult& result, std::size_t window);
void write_histogram_csv(std::ostream& out, const Histogram& hist, const std::string& title);
void write_hops_csv(std::ostream& out, const PathStats& stats);
void write_path_stats_csv(std::ostream& out, const PathStats& stats);
void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& title);

}  // namespace sinkdir
