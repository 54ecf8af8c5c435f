// Command-line driver: single runs, (f, k) sweeps, figure reproduction and
// oracle validation.
//
//   sinkdir single    [flags]   one run, CSVs + summary line
//   sinkdir sweep     [flags]   fig6_sweep.csv over --f-list x --k-list x --seeds
//   sinkdir paperfigs [flags]   all figure datasets plus report.txt
//   sinkdir validate  [flags]   run once and check against the exact tree
//
// Exit codes: 0 ok, 2 configuration error, 3 livelock abort, 4 invariant breach.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sinkdir/config.hpp"
#include "sinkdir/engine.hpp"
#include "sinkdir/experiment.hpp"
#include "sinkdir/metrics.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitLivelock = 3;
constexpr int kExitInvariant = 4;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const std::vector<Flag> kFlags{
    {"--n", "n", "number of nodes"},
    {"--side", "side", "side of the square area (m)"},
    {"--range", "range", "transmission range (m)"},
    {"--k", "k", "listen to the k cheapest in-range neighbours"},
    {"--f", "f", "gate factor (>= 1)"},
    {"--gate-mode", "gate_mode", "significant_improvement | literal"},
    {"--variant", "variant", "baseline | gated | neighbour_list | time_sync"},
    {"--a", "a", "cost model distance scale a (m)"},
    {"--b", "b", "cost model exponential scale b (m)"},
    {"--gamma", "gamma", "cost model power"},
    {"--seed", "seed", "layout and delay seed"},
    {"--delay-min", "delay_min", "smallest advertisement delay (steps)"},
    {"--delay-max", "delay_max", "largest advertisement delay (steps)"},
    {"--sink-x", "sink_x", "sink target x (nearest node becomes the sink)"},
    {"--sink-y", "sink_y", "sink target y"},
    {"--out", "out", "output root (default $SINKDIR_OUT or ./sinkdir_out)"},
    {"--workers", "workers", "concurrent sweep cells (0 = all cores)"},
    {"--v", "v", "time_sync velocity (cost per step)"},
    {"--horizon", "horizon", "livelock safety horizon (steps)"},
    {"--window", "window", "moving-average window for fig2 (steps)"},
    {"--layout", "layout", "layout CSV (id,x,y) to reuse"},
    {"--f-list", "f_list", "sweep f values, comma separated"},
    {"--k-list", "k_list", "sweep k values, comma separated"},
    {"--seeds", "seeds", "sweep seeds, comma separated"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sink direction protocol simulator"};
  app.require_subcommand(1);

  std::map<std::string, std::string> given;
  for (const Flag& f : kFlags) app.add_option(f.name, given[f.key], f.help);
  std::string config_path, dump_path;
  bool compare = false;
  app.add_option("--config", config_path, "flat key = value file; flags override it");
  app.add_option("--dump-config", dump_path, "write the effective configuration here");
  app.add_flag("--compare-gate-modes", compare, "sweep: also run the other gate mode");

  auto* single = app.add_subcommand("single", "one run with CSV outputs")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "(f, k) grid over seeds")->fallthrough();
  auto* paperfigs = app.add_subcommand("paperfigs", "all figure datasets and a report")->fallthrough();
  auto* validate = app.add_subcommand("validate", "check a run against the exact tree")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  sinkdir::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw sinkdir::ConfigError("cannot read config file " + config_path);
      sinkdir::load_config(cfg, in);
    }
    for (const Flag& f : kFlags)
      if (app.count(f.name) > 0) sinkdir::apply_setting(cfg, f.key, given[f.key]);
    if (compare) cfg.compare_gate_modes = true;
    cfg.validate();
    if (!dump_path.empty()) {
      std::ofstream out(dump_path);
      if (!out) throw sinkdir::ConfigError("cannot write " + dump_path);
      sinkdir::dump_config(out, cfg);
    }

    if (single->parsed()) {
      const auto outcome = sinkdir::run_single(cfg, std::cerr);
      std::cout << sinkdir::summary_line(outcome.summary) << '\n';
      std::cerr << "outputs in " << outcome.dir.string() << '\n';
    } else if (sweep->parsed()) {
      sinkdir::run_sweep(cfg, std::cerr);
    } else if (paperfigs->parsed()) {
      const auto outcome = sinkdir::run_paperfigs(cfg, std::cerr);
      std::ifstream report(outcome.report);
      std::cout << report.rdbuf();
    } else if (validate->parsed()) {
      const auto failures = sinkdir::run_validate(cfg, std::cerr);
      for (const auto& f : failures) std::cerr << "FAIL: " << f << '\n';
      if (!failures.empty()) return kExitInvariant;
      std::cout << "valid\n";
    }
  } catch (const sinkdir::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sinkdir::LivelockError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLivelock;
  } catch (const sinkdir::InvariantError& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
