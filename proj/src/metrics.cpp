#include "sinkdir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sinkdir {

std::uint64_t Histogram::total() const {
  std::uint64_t sum = underflow + overflow;
  for (auto c : counts) sum += c;
  return sum;
}

std::optional<double> Histogram::mode() const {
  if (counts.empty()) return std::nullopt;
  const auto it = std::max_element(counts.begin(), counts.end());
  if (*it == 0) return std::nullopt;
  return edges[static_cast<std::size_t>(it - counts.begin())];
}

Histogram make_histogram(std::span<const double> samples, std::vector<double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i]))
      throw std::invalid_argument("histogram: edges must be strictly ascending");
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  h.edges = std::move(edges);
  for (double s : samples) {
    if (s < h.edges.front()) {
      ++h.underflow;
    } else if (s >= h.edges.back()) {
      ++h.overflow;
    } else {
      const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), s);
      ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
    }
  }
  return h;
}

std::vector<double> integer_edges(std::uint64_t max_value) {
  std::vector<double> edges(max_value + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = static_cast<double>(i);
  return edges;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram: bins must be >= 1");
  if (!(hi > lo)) hi = lo + 1.0;
  hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;
  return edges;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= window) sum -= series[i - window];
    const std::size_t len = std::min(i + 1, window);
    out[i] = sum / static_cast<double>(len);
  }
  return out;
}

Histogram message_histogram(const RunResult& result, std::optional<std::vector<double>> edges) {
  std::vector<double> samples;
  samples.reserve(result.final_states.size());
  std::uint32_t max_sent = 0;
  for (const FinalNode& s : result.final_states) {
    samples.push_back(s.messages_sent);
    max_sent = std::max(max_sent, s.messages_sent);
  }
  return make_histogram(samples, edges ? std::move(*edges) : integer_edges(max_sent));
}

PathStats path_stats(const RunResult& result, const ListenGraph& graph, std::size_t cost_bins) {
  const std::size_t n = result.final_states.size();
  const NodeId sink = graph.sink();
  PathStats stats;
  stats.nodes.resize(n);

  constexpr std::uint32_t kUnknown = std::numeric_limits<std::uint32_t>::max();
  constexpr std::uint32_t kOnStack = kUnknown - 1;
  std::vector<std::uint32_t> hops(n, kUnknown);
  if (n > 0) hops[sink] = 0;
  std::vector<NodeId> chain;

  for (NodeId start = 0; start < n; ++start) {
    if (!result.final_states[start].estimate.reached() || hops[start] != kUnknown) continue;
    chain.clear();
    NodeId at = start;
    while (hops[at] == kUnknown) {
      const auto& s = result.final_states[at];
      if (!s.pointer || !s.estimate.reached())
        throw InvariantError("pointer chain from node " + std::to_string(start) +
                             " ends at node " + std::to_string(at) + " before the sink");
      hops[at] = kOnStack;
      chain.push_back(at);
      at = *s.pointer;
    }
    if (hops[at] == kOnStack)
      throw InvariantError("pointer cycle through node " + std::to_string(at));
    std::uint32_t h = hops[at];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) hops[*it] = ++h;
  }

  std::vector<double> costs, chain_len, intermediate;
  double max_cost = 0.0;
  std::uint32_t max_hops = 0;
  for (NodeId id = 0; id < n; ++id) {
    const auto& s = result.final_states[id];
    stats.nodes[id].cost = s.estimate;
    if (!s.estimate.reached()) continue;
    stats.nodes[id].hops = hops[id];
    costs.push_back(s.estimate.value());
    max_cost = std::max(max_cost, s.estimate.value());
    chain_len.push_back(hops[id]);
    max_hops = std::max(max_hops, hops[id]);
    if (id != sink) intermediate.push_back(hops[id] - 1.0);
  }
  stats.cost_hist = make_histogram(costs, uniform_edges(0.0, max_cost, cost_bins));
  stats.hops_hist = make_histogram(chain_len, integer_edges(max_hops));
  stats.intermediate_hist = make_histogram(intermediate, integer_edges(max_hops));
  return stats;
}

RunSummary summarize(const RunResult& result, const ListenGraph& graph,
                     const OptimalTree* oracle) {
  RunSummary sum;
  sum.nodes = result.final_states.size();
  sum.total_messages = result.total_messages;
  sum.converged_at = result.converged_at;
  const PathStats paths = path_stats(result, graph);

  double messages = 0.0, cost = 0.0, hops = 0.0, ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t ratio_count = 0;
  for (NodeId id = 0; id < sum.nodes; ++id) {
    const FinalNode& s = result.final_states[id];
    if (!s.estimate.reached()) {
      ++sum.unreached;
      continue;
    }
    ++sum.reached;
    messages += s.messages_sent;
    cost += s.estimate.value();
    hops += *paths.nodes[id].hops;
    if (oracle && id != graph.sink()) {
      const RouteCost best = oracle->cost[id];
      if (!best.reached())
        throw InvariantError("node " + std::to_string(id) + " reached but oracle-unreachable");
      const double r = best.value() > 0.0 ? s.estimate.value() / best.value()
                                          : (s.estimate.value() == 0.0 ? 1.0 : 0.0);
      ratio += r;
      min_ratio = std::min(min_ratio, r);
      ++ratio_count;
    }
  }
  if (sum.reached > 0) {
    const auto reached = static_cast<double>(sum.reached);
    sum.mean_messages = messages / reached;
    sum.mean_cost = cost / reached;
    sum.mean_hops = hops / reached;
  }
  if (oracle) {
    sum.mean_cost_ratio = ratio_count ? ratio / static_cast<double>(ratio_count) : 1.0;
    sum.min_cost_ratio = ratio_count ? min_ratio : 1.0;
  }
  return sum;
}

namespace {

struct CellOutcome {
  std::optional<RunSummary> summary;
  bool disconnected = false;
};

struct PreparedGraph {
  ListenGraph graph;
  OptimalTree oracle;
  bool disconnected = false;
};

SweepTable sweep_impl(std::span<const SweepReplicate> replicates, const SweepSpec& spec,
                      bool parallel) {
  spec.protocol.validate();
  const std::size_t nk = spec.k_values.size(), nf = spec.f_values.size(),
                    nr = replicates.size();

  std::vector<PreparedGraph> graphs(nk * nr);
  for (std::size_t ki = 0; ki < nk; ++ki)
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const SweepReplicate& rep = replicates[ri];
      PreparedGraph& g = graphs[ki * nr + ri];
      g.graph = parallel ? build_listen_graph(rep.positions, spec.range, spec.k_values[ki],
                                              spec.cost, rep.sink)
                         : build_listen_graph_serial(rep.positions, spec.range,
                                                     spec.k_values[ki], spec.cost, rep.sink);
      g.oracle = shortest_path_tree(g.graph);
      const auto reach = reachable_set(g.graph);
      const auto count = static_cast<double>(std::count(reach.begin(), reach.end(), true));
      g.disconnected = count < 0.99 * static_cast<double>(rep.positions.size());
    }

  const auto cells = static_cast<std::int64_t>(nk * nf * nr);
  std::vector<CellOutcome> outcomes(static_cast<std::size_t>(cells));
  const int threads = spec.workers > 0 ? spec.workers : 0;

  auto run_cell = [&](std::int64_t c) {
    const auto cell = static_cast<std::size_t>(c);
    const std::size_t ri = cell % nr, fi = (cell / nr) % nf, ki = cell / (nr * nf);
    const PreparedGraph& g = graphs[ki * nr + ri];
    ProtocolConfig cfg = spec.protocol;
    cfg.f = spec.f_values[fi];
    CellOutcome& out = outcomes[cell];
    out.disconnected = g.disconnected;
    try {
      const RunResult result = run(g.graph, cfg, replicates[ri].seed, spec.options);
      out.summary = summarize(result, g.graph, &g.oracle);
    } catch (const LivelockError&) {
      out.summary.reset();
    }
  };

  if (parallel && threads > 0) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t c = 0; c < cells; ++c) run_cell(c);
  } else if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    for (std::int64_t c = 0; c < cells; ++c) run_cell(c);
  }

  SweepTable table;
  for (std::size_t ki = 0; ki < nk; ++ki)
    for (std::size_t fi = 0; fi < nf; ++fi) {
      SweepRow row;
      row.k = spec.k_values[ki];
      row.f = spec.f_values[fi];
      row.seeds = nr;
      std::size_t ok = 0;
      for (std::size_t ri = 0; ri < nr; ++ri) {
        const CellOutcome& out = outcomes[(ki * nf + fi) * nr + ri];
        row.disconnected += out.disconnected;
        if (!out.summary) {
          ++row.livelocked;
          continue;
        }
        ++ok;
        row.mean_messages += out.summary->mean_messages;
        row.mean_cost += out.summary->mean_cost;
        row.mean_hops += out.summary->mean_hops;
        row.mean_cost_ratio += out.summary->mean_cost_ratio.value_or(1.0);
        row.unreached += static_cast<double>(out.summary->unreached);
        row.converged_at += static_cast<double>(out.summary->converged_at);
      }
      if (ok > 0) {
        const auto d = static_cast<double>(ok);
        row.mean_messages /= d;
        row.mean_cost /= d;
        row.mean_hops /= d;
        row.mean_cost_ratio /= d;
        row.unreached /= d;
        row.converged_at /= d;
      }
      table.push_back(row);
    }
  return table;
}

}  // namespace

SweepTable sweep(std::span<const SweepReplicate> replicates, const SweepSpec& spec) {
  return sweep_impl(replicates, spec, true);
}

SweepTable sweep_serial(std::span<const SweepReplicate> replicates, const SweepSpec& spec) {
  return sweep_impl(replicates, spec, false);
}

void write_timeseries_csv(std::ostream& out, const RunResult& result, std::size_t window) {
  std::vector<double> series(result.per_step_tx.begin(), result.per_step_tx.end());
  const auto smooth = moving_average(series, window);
  out << "# transmissions per step (all nodes); moving_avg: trailing " << window
      << "-step mean\n";
  out << "time,tx_count,moving_avg\n" << std::setprecision(17);
  for (std::size_t t = 0; t < series.size(); ++t)
    out << t << ',' << result.per_step_tx[t] << ',' << smooth[t] << '\n';
}

void write_histogram_csv(std::ostream& out, const Histogram& hist, const std::string& title) {
  out << "# " << title << '\n';
  out << "# samples=" << hist.total() << " underflow=" << hist.underflow
      << " overflow=" << hist.overflow << '\n';
  out << "bin_lo,bin_hi,count\n" << std::setprecision(17);
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    out << hist.edges[i] << ',' << hist.edges[i + 1] << ',' << hist.counts[i] << '\n';
}

void write_hops_csv(std::ostream& out, const PathStats& stats) {
  out << "# chain_length: pointer hops from node to sink (sink = 0)\n";
  out << "# intermediate: relays strictly between node and sink (non-sink nodes only)\n";
  out << "hops,chain_length_count,intermediate_count\n";
  for (std::size_t i = 0; i < stats.hops_hist.counts.size(); ++i)
    out << i << ',' << stats.hops_hist.counts[i] << ',' << stats.intermediate_hist.counts[i]
        << '\n';
}

void write_path_stats_csv(std::ostream& out, const PathStats& stats) {
  out << "id,cost,hops,intermediate\n" << std::setprecision(17);
  for (NodeId id = 0; id < stats.nodes.size(); ++id) {
    const NodePath& p = stats.nodes[id];
    out << id << ',';
    if (p.cost.reached()) out << p.cost.value();
    out << ',';
    if (p.hops) out << *p.hops;
    out << ',';
    if (p.hops && *p.hops > 0) out << *p.hops - 1;
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepTable& table, const std::string& title) {
  out << "# " << title << '\n';
  out << "# means over reached nodes and non-livelocked seeds; the sink counts as a sender "
         "with 1 message\n";
  out << "k,f,mean_messages,mean_cost,mean_hops,mean_cost_ratio,unreached,converged_at,seeds,"
         "disconnected,livelocked\n"
      << std::setprecision(17);
  for (const SweepRow& r : table)
    out << r.k << ',' << r.f << ',' << r.mean_messages << ',' << r.mean_cost << ','
        << r.mean_hops << ',' << r.mean_cost_ratio << ',' << r.unreached << ','
        << r.converged_at << ',' << r.seeds << ',' << r.disconnected << ',' << r.livelocked
        << '\n';
}

}  // namespace sinkdir
