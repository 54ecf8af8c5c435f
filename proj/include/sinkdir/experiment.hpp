#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sinkdir/config.hpp"
#include "sinkdir/engine.hpp"
#include "sinkdir/metrics.hpp"
#include "sinkdir/oracle.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

/// Output root: cfg.out, else $SINKDIR_OUT, else ./sinkdir_out.
std::filesystem::path output_root(const RunConfig& cfg);

/// Loads cfg.layout when set, otherwise places cfg.n nodes with `seed`.
std::vector<Point> make_layout(const RunConfig& cfg, std::uint64_t seed);

struct Instance {
  std::vector<Point> positions;
  NodeId sink = 0;
  ListenGraph graph;
  OptimalTree oracle;
};

Instance make_instance(const RunConfig& cfg, std::vector<Point> positions, std::size_t k);

/// Hard checks applied to every finished run: acyclic pointer chains ending
/// at the sink, no node below its optimal cost, and (except for the
/// neighbour-list variant) every relay-reachable node reached. Throws
/// InvariantError.
void check_run_invariants(const RunResult& result, const Instance& instance,
                          const ProtocolConfig& protocol);

/// Writes final_state, event_log, path_stats, oracle_tree and the per-run
/// figure files (fig2..fig5) into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result,
                       const Instance& instance, std::size_t window);

/// Six significant digits: total messages, mean msgs/node, mean cost,
/// converged_at.
std::string summary_line(const RunSummary& summary);

struct SingleOutcome {
  std::filesystem::path dir;
  RunSummary summary;
  DegreeStats degree;
  double seconds = 0.0;
};

SingleOutcome run_single(const RunConfig& cfg, std::ostream& log);

struct SweepOutcome {
  std::filesystem::path dir;
  SweepTable table;
  std::optional<SweepTable> literal_table;
  std::string arbitration;
};

/// Horizon used for literal-gate cells in a gate-mode comparison; that mode
/// is expected to livelock for f > 1.
inline constexpr TimeStep kComparisonHorizon = 100'000;

SweepTable sweep_for(const RunConfig& cfg, GateMode mode, TimeStep horizon);
SweepOutcome run_sweep(const RunConfig& cfg, std::ostream& log);

/// Which gate mode puts (f = 1.1, k = 8) traffic inside [2, 4.5] msgs/node.
std::string gate_mode_arbitration(const SweepTable& significant, const SweepTable& literal);

struct PaperfigsOutcome {
  std::filesystem::path dir;
  std::filesystem::path report;
};

PaperfigsOutcome run_paperfigs(const RunConfig& cfg, std::ostream& log);

/// Runs the configured instance and checks it against the oracle (exact
/// agreement for baseline and time_sync, lower bound otherwise). Returns
/// the list of failed checks; empty means valid.
std::vector<std::string> run_validate(const RunConfig& cfg, std::ostream& log);

}  // namespace sinkdir
