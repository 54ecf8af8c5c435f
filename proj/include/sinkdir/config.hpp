#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sinkdir/protocol.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to reproduce a run or a sweep. Defaults reproduce the
/// reference scenario: 4000 nodes on a 4000 m square, 300 m range,
/// a = b = 100 m, gamma 1.5, delays 1..100 steps, sink nearest (200, 200),
/// and the rapid configuration k = 8, f = 1.1.
struct RunConfig {
  std::size_t n = 4000;
  double side = 4000.0;
  double range = 300.0;
  std::size_t k = 8;
  double f = 1.1;
  GateMode gate_mode = GateMode::significant_improvement;
  Variant variant = Variant::gated;
  CostModelParams cost;
  Point sink{200.0, 200.0};
  std::uint64_t seed = 1;
  TimeStep delay_min = 1;
  TimeStep delay_max = 100;
  std::optional<double> v;
  TimeStep horizon = 10'000'000;
  std::size_t window = 200;
  /// Layout CSV to load instead of placing nodes; n is then taken from it.
  std::string layout;
  /// Output root; empty falls back to $SINKDIR_OUT, then ./sinkdir_out.
  std::string out;
  int workers = 0;

  std::vector<double> f_list{1.0, 1.01, 1.02, 1.05, 1.1, 1.2, 1.3, 1.4, 1.5};
  std::vector<std::size_t> k_list{8, 12, 16, 32};
  std::vector<std::uint64_t> seeds{1};
  bool compare_gate_modes = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  ProtocolConfig protocol() const;
};

/// Every recognised key, in dump order.
const std::vector<std::string_view>& config_keys();

/// Sets one key from its text form. Throws ConfigError on an unknown key or
/// an unparsable value.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Reads flat `key = value` lines; `#` starts a comment. Later lines win.
void load_config(RunConfig& cfg, std::istream& in);

/// Writes every key at full precision; load_config on the output
/// reproduces `cfg` exactly.
void dump_config(std::ostream& out, const RunConfig& cfg);

/// FNV-1a over the dump of everything except seed, seeds, out and workers,
/// as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace sinkdir
