#include "sinkdir/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace sinkdir {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Output location and thread count do not change results, so they are left
// out of the recorded config to keep output trees comparable across hosts.
void write_config(const fs::path& path, RunConfig cfg) {
  cfg.out.clear();
  cfg.workers = 0;
  auto out = open_out(path);
  dump_config(out, cfg);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt6(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

const SweepRow* find_row(const SweepTable& table, std::size_t k, double f) {
  for (const SweepRow& r : table)
    if (r.k == k && std::abs(r.f - f) < 1e-12) return &r;
  return nullptr;
}

}  // namespace

fs::path output_root(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("SINKDIR_OUT"); env && *env) return env;
  return "sinkdir_out";
}

std::vector<Point> make_layout(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.layout.empty()) return place_nodes(cfg.n, cfg.side, seed);
  std::ifstream in(cfg.layout);
  if (!in) throw ConfigError("cannot read layout file " + cfg.layout);
  try {
    auto positions = read_layout_csv(in);
    if (positions.empty()) throw ConfigError("layout file " + cfg.layout + " has no nodes");
    return positions;
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

Instance make_instance(const RunConfig& cfg, std::vector<Point> positions, std::size_t k) {
  Instance inst;
  inst.positions = std::move(positions);
  inst.sink = nearest_node(inst.positions, cfg.sink);
  inst.graph = build_listen_graph(inst.positions, cfg.range, k, cfg.cost, inst.sink);
  inst.oracle = shortest_path_tree(inst.graph);
  return inst;
}

void check_run_invariants(const RunResult& result, const Instance& instance,
                          const ProtocolConfig& protocol) {
  path_stats(result, instance.graph);
  const auto reach = reachable_set(instance.graph);
  for (NodeId id = 0; id < result.final_states.size(); ++id) {
    const RouteCost got = result.final_states[id].estimate;
    const RouteCost best = instance.oracle.cost[id];
    if (got.reached() && !best.reached())
      throw InvariantError("node " + std::to_string(id) + " reached without a relay path");
    if (got.reached() && got.value() < best.value() * (1.0 - 1e-12))
      throw InvariantError("node " + std::to_string(id) + " estimate below optimum");
    if (protocol.variant != Variant::neighbour_list && reach[id] && !got.reached())
      throw InvariantError("reachable node " + std::to_string(id) + " never reached");
  }
}

void write_run_outputs(const fs::path& dir, const RunResult& result, const Instance& instance,
                       std::size_t window) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "final_state.csv");
    write_final_state_csv(out, result);
  }
  {
    auto out = open_out(dir / "event_log.csv");
    write_event_log_csv(out, result);
  }
  {
    auto out = open_out(dir / "oracle_tree.csv");
    write_tree_csv(out, instance.oracle);
  }
  {
    auto out = open_out(dir / "fig2_timeseries.csv");
    write_timeseries_csv(out, result, window);
  }
  {
    auto out = open_out(dir / "fig3_messages_hist.csv");
    write_histogram_csv(out, message_histogram(result),
                        "messages sent per node (sink included); bins [lo, hi)");
  }
  const PathStats paths = path_stats(result, instance.graph);
  {
    auto out = open_out(dir / "fig4_cost_hist.csv");
    write_histogram_csv(out, paths.cost_hist, "route cost per reached node; bins [lo, hi)");
  }
  {
    auto out = open_out(dir / "fig5_hops_hist.csv");
    write_hops_csv(out, paths);
  }
  {
    auto out = open_out(dir / "path_stats.csv");
    write_path_stats_csv(out, paths);
  }
}

std::string summary_line(const RunSummary& s) {
  std::ostringstream out;
  out << std::setprecision(6) << "total_messages=" << s.total_messages
      << " mean_msgs_per_node=" << s.mean_messages << " mean_cost=" << s.mean_cost
      << " converged_at=" << s.converged_at;
  return out.str();
}

SingleOutcome run_single(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  auto positions = make_layout(cfg, cfg.seed);
  for (const auto& [a, b] : coincident_pairs(positions))
    log << "warning: nodes " << a << " and " << b << " coincide (zero-cost link)\n";

  SingleOutcome outcome;
  outcome.degree = degree_stats(positions, cfg.range, cfg.side);
  const Instance inst = make_instance(cfg, std::move(positions), cfg.k);
  const ProtocolConfig protocol = cfg.protocol();
  RunOptions options;
  options.horizon = cfg.horizon;
  const RunResult result = run(inst.graph, protocol, cfg.seed, options);
  check_run_invariants(result, inst, protocol);
  outcome.summary = summarize(result, inst.graph, &inst.oracle);
  outcome.seconds = seconds_since(start);

  outcome.dir = output_root(cfg) / (config_hash(cfg) + "_s" + std::to_string(cfg.seed));
  write_run_outputs(outcome.dir, result, inst, cfg.window);
  write_config(outcome.dir / "config.txt", cfg);
  {
    auto out = open_out(outcome.dir / "layout.csv");
    write_layout_csv(out, inst.positions);
  }
  {
    auto out = open_out(outcome.dir / "summary.txt");
    out << summary_line(outcome.summary) << '\n'
        << "reached=" << outcome.summary.reached << " unreached=" << outcome.summary.unreached
        << " mean_hops=" << fmt6(outcome.summary.mean_hops)
        << " mean_cost_ratio=" << fmt6(outcome.summary.mean_cost_ratio.value_or(1.0))
        << " setup_messages=" << result.setup_messages << '\n'
        << "mean_degree_all=" << fmt6(outcome.degree.mean_all)
        << " mean_degree_interior=" << fmt6(outcome.degree.mean_interior) << '\n';
  }
  return outcome;
}

SweepTable sweep_for(const RunConfig& cfg, GateMode mode, TimeStep horizon) {
  std::vector<SweepReplicate> replicates;
  for (std::uint64_t seed : cfg.seeds) {
    SweepReplicate rep;
    rep.positions = make_layout(cfg, seed);
    rep.sink = nearest_node(rep.positions, cfg.sink);
    rep.seed = seed;
    replicates.push_back(std::move(rep));
  }
  SweepSpec spec;
  spec.range = cfg.range;
  spec.cost = cfg.cost;
  spec.protocol = cfg.protocol();
  spec.protocol.gate_mode = mode;
  spec.f_values = cfg.f_list;
  spec.k_values = cfg.k_list;
  spec.options.horizon = horizon;
  spec.workers = cfg.workers;
  return sweep(replicates, spec);
}

std::string gate_mode_arbitration(const SweepTable& significant, const SweepTable& literal) {
  constexpr double lo = 2.0, hi = 4.5;
  std::ostringstream out;
  out << "gate-mode arbitration at f = 1.1, k = 8 (target band [" << lo << ", " << hi
      << "] msgs/node)\n";
  bool any = false;
  for (const auto& [name, table] :
       {std::pair{"significant_improvement", &significant}, std::pair{"literal", &literal}}) {
    const SweepRow* row = find_row(*table, 8, 1.1);
    if (!row) {
      out << "  " << name << ": cell not in grid\n";
      continue;
    }
    const bool ok = row->livelocked == 0 && row->mean_messages >= lo && row->mean_messages <= hi;
    any = any || ok;
    out << "  " << name << ": ";
    if (row->livelocked == row->seeds)
      out << "livelock on every seed (no quiescence within horizon)";
    else
      out << "mean msgs/node " << fmt6(row->mean_messages) << " over "
          << row->seeds - row->livelocked << " seed(s), " << row->livelocked << " livelocked";
    out << (ok ? "  -> inside band\n" : "  -> outside band\n");
  }
  if (!any) out << "  neither mode lands in the band\n";
  return out.str();
}

SweepOutcome run_sweep(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  SweepOutcome outcome;
  outcome.dir = output_root(cfg) / ("sweep_" + config_hash(cfg));
  fs::create_directories(outcome.dir);
  write_config(outcome.dir / "config.txt", cfg);
  outcome.table = sweep_for(cfg, cfg.gate_mode, cfg.horizon);
  {
    auto out = open_out(outcome.dir / "fig6_sweep.csv");
    write_sweep_csv(out, outcome.table,
                    std::string("mean messages and path cost over (k, f); gate_mode=") +
                        std::string(to_string(cfg.gate_mode)));
  }
  log << "wrote " << (outcome.dir / "fig6_sweep.csv").string() << " (" << outcome.table.size()
      << " rows)\n";

  if (cfg.compare_gate_modes) {
    const GateMode other = cfg.gate_mode == GateMode::literal ? GateMode::significant_improvement
                                                              : GateMode::literal;
    const TimeStep horizon = other == GateMode::literal
                                 ? std::min(cfg.horizon, kComparisonHorizon)
                                 : cfg.horizon;
    outcome.literal_table = sweep_for(cfg, other, horizon);
    const auto name = std::string("fig6_sweep_") + std::string(to_string(other)) + ".csv";
    {
      auto out = open_out(outcome.dir / name);
      write_sweep_csv(out, *outcome.literal_table,
                      std::string("mean messages and path cost over (k, f); gate_mode=") +
                          std::string(to_string(other)) + "; horizon=" + std::to_string(horizon));
    }
    const SweepTable& sig = other == GateMode::literal ? outcome.table : *outcome.literal_table;
    const SweepTable& lit = other == GateMode::literal ? *outcome.literal_table : outcome.table;
    outcome.arbitration = gate_mode_arbitration(sig, lit);
    auto out = open_out(outcome.dir / "gate_mode_report.txt");
    out << outcome.arbitration;
    log << outcome.arbitration;
  }
  return outcome;
}

PaperfigsOutcome run_paperfigs(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  PaperfigsOutcome outcome;
  outcome.dir =
      output_root(cfg) / ("paperfigs_" + config_hash(cfg) + "_s" + std::to_string(cfg.seed));
  fs::create_directories(outcome.dir);
  write_config(outcome.dir / "config.txt", cfg);

  const auto positions = make_layout(cfg, cfg.seed);
  {
    auto out = open_out(outcome.dir / "layout.csv");
    write_layout_csv(out, positions);
  }
  const DegreeStats degree = degree_stats(positions, cfg.range, cfg.side);

  struct Case {
    std::string label;
    std::size_t k;
    double f;
    Variant variant;
  };
  std::vector<Case> cases;
  for (std::size_t k : {8, 12, 16, 32})
    for (double f : {1.0, 1.1}) {
      std::ostringstream label;
      label << "k" << k << "_f" << f;
      cases.push_back({label.str(), k, f, Variant::gated});
    }
  cases.push_back({"unrestricted_f1", positions.size(), 1.0, Variant::gated});
  cases.push_back({"neighbour_list_k8_f1", 8, 1.0, Variant::neighbour_list});

  std::ofstream report = open_out(outcome.dir / "report.txt");
  report << "# measured statistics, n=" << positions.size() << " seed=" << cfg.seed << '\n';
  report << "interior mean in-range degree (range " << cfg.range << "): " << fmt6(degree.mean_interior)
         << " over " << degree.interior_count << " nodes (reference 70); all nodes: "
         << fmt6(degree.mean_all) << "\n\n";
  report << "run                      msgs/node  mode  mean_cost  cost_ratio  mean_hops  "
            "converged_at  seconds\n";

  std::map<std::string, RunSummary> by_label;
  for (const Case& c : cases) {
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = make_instance(cfg, positions, c.k);
    ProtocolConfig protocol = cfg.protocol();
    protocol.variant = c.variant;
    protocol.f = c.f;
    protocol.gate_mode = GateMode::significant_improvement;
    RunOptions options;
    options.horizon = cfg.horizon;
    const RunResult result = run(inst.graph, protocol, cfg.seed, options);
    check_run_invariants(result, inst, protocol);
    const RunSummary s = summarize(result, inst.graph, &inst.oracle);
    const double secs = seconds_since(start);
    write_run_outputs(outcome.dir / c.label, result, inst, cfg.window);
    by_label[c.label] = s;
    report << std::left << std::setw(25) << c.label << std::setw(11) << fmt6(s.mean_messages)
           << std::setw(6) << fmt6(message_histogram(result).mode().value_or(0))
           << std::setw(11) << fmt6(s.mean_cost) << std::setw(12)
           << fmt6(s.mean_cost_ratio.value_or(1.0)) << std::setw(11) << fmt6(s.mean_hops)
           << std::setw(14) << s.converged_at << fmt6(secs) << '\n';
    log << c.label << ": " << summary_line(s) << '\n';
  }

  RunConfig sweep_cfg = cfg;
  const SweepTable table = sweep_for(sweep_cfg, GateMode::significant_improvement, cfg.horizon);
  {
    auto out = open_out(outcome.dir / "fig6_sweep.csv");
    write_sweep_csv(out, table, "mean messages and path cost over (k, f); significant_improvement");
  }

  const RunSummary& rapid = by_label.at("k8_f1.1");
  const RunSummary& full = by_label.at("k32_f1");
  report << "\ncomparisons against reference values\n";
  report << "  rapid method (k=8, f=1.1) msgs/node: " << fmt6(rapid.mean_messages)
         << " (reference 3-4)\n";
  report << "  comprehensive (k=32, f=1) msgs/node: " << fmt6(full.mean_messages)
         << " (reference about 30)\n";
  if (const SweepRow* row = find_row(table, 8, 1.2))
    report << "  k=8, f=1.2 msgs/node (sweep): " << fmt6(row->mean_messages)
           << " (reference about 2)\n";
  report << "  mean hops rapid vs comprehensive: " << fmt6(rapid.mean_hops) << " vs "
         << fmt6(full.mean_hops) << " (reference: rapid shorter)\n";
  report << "  mean cost ratio rapid vs comprehensive: "
         << fmt6(rapid.mean_cost_ratio.value_or(1.0)) << " vs "
         << fmt6(full.mean_cost_ratio.value_or(1.0)) << " (reference: rapid not cost optimal)\n";
  outcome.report = outcome.dir / "report.txt";
  log << "wrote " << outcome.report.string() << '\n';
  return outcome;
}

std::vector<std::string> run_validate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::vector<std::string> failures;
  auto positions = make_layout(cfg, cfg.seed);
  const auto coincident = coincident_pairs(positions);
  for (const auto& [a, b] : coincident)
    log << "warning: nodes " << a << " and " << b << " coincide (zero-cost link)\n";
  const Instance inst = make_instance(cfg, std::move(positions), cfg.k);

  if (!relaxation_check(inst.graph, inst.oracle)) failures.push_back("oracle relaxation check");
  const auto reach = reachable_set(inst.graph);
  for (NodeId id = 0; id < reach.size(); ++id)
    if (reach[id] != inst.oracle.cost[id].reached()) {
      failures.push_back("oracle reachability disagrees at node " + std::to_string(id));
      break;
    }
  const std::size_t reachable = static_cast<std::size_t>(std::count(reach.begin(), reach.end(), true));
  log << "reachable " << reachable << " of " << reach.size() << " nodes\n";

  const ProtocolConfig protocol = cfg.protocol();
  RunOptions options;
  options.horizon = cfg.horizon;
  const RunResult result = run(inst.graph, protocol, cfg.seed, options);
  try {
    check_run_invariants(result, inst, protocol);
  } catch (const InvariantError& e) {
    failures.push_back(e.what());
  }
  const bool exact = protocol.variant == Variant::baseline ||
                     protocol.variant == Variant::time_sync ||
                     (protocol.variant == Variant::gated && protocol.f == 1.0);
  if (exact) {
    for (NodeId id = 0; id < result.final_states.size(); ++id) {
      const RouteCost got = result.final_states[id].estimate;
      const RouteCost best = inst.oracle.cost[id];
      if (got.reached() != best.reached() ||
          (got.reached() && std::abs(got.value() - best.value()) > 1e-12 * best.value())) {
        failures.push_back("node " + std::to_string(id) + " differs from the optimal cost");
        break;
      }
    }
  }
  if (protocol.variant == Variant::time_sync)
    for (NodeId id = 0; id < result.final_states.size(); ++id)
      if (result.final_states[id].estimate.reached() && result.final_states[id].messages_sent != 1) {
        failures.push_back("time_sync node " + std::to_string(id) + " sent " +
                           std::to_string(result.final_states[id].messages_sent) + " messages");
        break;
      }
  log << summary_line(summarize(result, inst.graph, &inst.oracle)) << '\n';
  return failures;
}

}  // namespace sinkdir
