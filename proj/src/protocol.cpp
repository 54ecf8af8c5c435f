#include "sinkdir/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sinkdir {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::gated: return "gated";
    case Variant::neighbour_list: return "neighbour_list";
    case Variant::time_sync: return "time_sync";
  }
  return "?";
}

std::string_view to_string(GateMode m) {
  switch (m) {
    case GateMode::significant_improvement: return "significant_improvement";
    case GateMode::literal: return "literal";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : {Variant::baseline, Variant::gated, Variant::neighbour_list, Variant::time_sync})
    if (s == to_string(v)) return v;
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (baseline|gated|neighbour_list|time_sync)");
}

GateMode parse_gate_mode(std::string_view s) {
  for (GateMode m : {GateMode::significant_improvement, GateMode::literal})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown gate mode '" + std::string(s) +
                              "' (significant_improvement|literal)");
}

void ProtocolConfig::validate() const {
  if (!(f >= 1.0)) throw std::invalid_argument("protocol: f must be >= 1");
  if (delay_min < 1) throw std::invalid_argument("protocol: delay_min must be >= 1");
  if (delay_max < delay_min) throw std::invalid_argument("protocol: delay_max must be >= delay_min");
  if (v && !(*v > 0.0)) throw std::invalid_argument("protocol: v must be > 0");
}

UpdateOutcome accept_update(const NodeState& state, const Advertisement& adv, double link) {
  UpdateOutcome out{state, link + adv.value, false};
  if (out.candidate < state.estimate.or_infinity()) {
    out.state.estimate = RouteCost::of(out.candidate);
    out.state.pointer = adv.sender;
    out.improved = true;
  }
  return out;
}

bool advertise_gate(double candidate, const NodeState& before, const ProtocolConfig& cfg) {
  if (cfg.variant == Variant::baseline) return candidate < before.last_advertised.or_infinity();
  switch (cfg.gate_mode) {
    case GateMode::significant_improvement:
      return candidate * cfg.f < before.last_advertised.or_infinity();
    case GateMode::literal:
      return candidate < cfg.f * before.estimate.or_infinity();
  }
  return false;
}

namespace {

bool suppress_by_lists(NodeId sender, double link_to_sender, std::span<const Link> x_list,
                       const std::vector<std::vector<Link>>& lists) {
  for (const Link& z : x_list) {
    if (z.node == sender) continue;
    for (const Link& hop : lists[z.node]) {
      if (hop.node != sender) continue;
      if (z.cost + hop.cost < link_to_sender) return true;
      break;
    }
  }
  return false;
}

}  // namespace

TwoHopTable::TwoHopTable(const ListenGraph& graph) {
  const std::size_t n = graph.size();
  lists_.resize(n);
  offset_.assign(n + 1, 0);
  for (NodeId z = 0; z < n; ++z) {
    const auto list = graph.listen_list(z);
    lists_[z].assign(list.begin(), list.end());
    offset_[z + 1] = offset_[z] + list.size();
  }
  // vector<bool> packs bits; fill per-node bytes in parallel, then pack.
  std::vector<unsigned char> verdict(offset_[n], 0);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto x = static_cast<NodeId>(i);
    const auto list = graph.listen_list(x);
    for (std::size_t j = 0; j < list.size(); ++j)
      verdict[offset_[x] + j] = suppress_by_lists(list[j].node, list[j].cost, list, lists_);
  }
  dominated_.assign(verdict.begin(), verdict.end());
}

TwoHopTable TwoHopTable::build_serial(const ListenGraph& graph) {
  TwoHopTable table;
  const std::size_t n = graph.size();
  table.lists_.resize(n);
  table.offset_.assign(n + 1, 0);
  for (NodeId z = 0; z < n; ++z) {
    const auto list = graph.listen_list(z);
    table.lists_[z].assign(list.begin(), list.end());
    table.offset_[z + 1] = table.offset_[z] + list.size();
  }
  for (NodeId x = 0; x < n; ++x)
    for (const Link& l : graph.listen_list(x))
      table.dominated_.push_back(neighbour_list_suppress(x, l.node, l.cost, table, graph));
  return table;
}

bool neighbour_list_suppress(NodeId x, NodeId sender, double link_to_sender,
                             const TwoHopTable& two_hop, const ListenGraph& graph) {
  for (const Link& z : graph.listen_list(x)) {
    if (z.node == sender) continue;
    for (const Link& hop : two_hop.neighbour_list(z.node)) {
      if (hop.node != sender) continue;
      if (z.cost + hop.cost < link_to_sender) return true;
      break;
    }
  }
  return false;
}

bool time_sync_release(const NodeState& state, TimeStep t, double v) {
  return state.estimate.reached() && state.messages_sent == 0 &&
         v * static_cast<double>(t) > state.estimate.value();
}

TimeStep release_step(double estimate, double v) {
  const double ratio = std::floor(estimate / v);
  if (!(ratio < 9.0e18)) throw std::overflow_error("time_sync: release step out of range");
  auto t = static_cast<TimeStep>(ratio) + 1;
  while (t > 0 && v * static_cast<double>(t - 1) > estimate) --t;
  while (!(v * static_cast<double>(t) > estimate)) ++t;
  return t;
}

}  // namespace sinkdir
