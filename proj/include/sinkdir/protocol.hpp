#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sinkdir/route_cost.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

using TimeStep = std::int64_t;

enum class Variant { baseline, gated, neighbour_list, time_sync };

/// How the gate factor f decides whether an accepted improvement is sent.
///  significant_improvement: send iff candidate * f < last advertised value.
///  literal: send iff candidate < f * estimate before the update.
enum class GateMode { significant_improvement, literal };

std::string_view to_string(Variant v);
std::string_view to_string(GateMode m);
/// Throw std::invalid_argument on unknown names.
Variant parse_variant(std::string_view s);
GateMode parse_gate_mode(std::string_view s);

struct ProtocolConfig {
  Variant variant = Variant::gated;
  double f = 1.0;
  GateMode gate_mode = GateMode::significant_improvement;
  TimeStep delay_min = 1;
  TimeStep delay_max = 100;
  /// Cost units per step for time_sync; unset picks
  /// min positive link cost / (delay_max + 1) on the run's graph.
  std::optional<double> v;

  void validate() const;
};

struct NodeState {
  RouteCost estimate;
  std::optional<NodeId> pointer;
  RouteCost last_advertised;
  std::optional<TimeStep> pending_tx;
  std::uint32_t messages_sent = 0;
  std::optional<NodeId> suppressed_by;
  /// time_sync only: step at which the release condition first holds.
  std::optional<TimeStep> release_at;
};

/// The only message on the air: a node's current route cost.
struct Advertisement {
  NodeId sender;
  double value;
  TimeStep sent_at;
};

struct UpdateOutcome {
  NodeState state;
  double candidate;
  bool improved;
};

/// candidate = C(X,N) + C(N,S); the state takes it (and points at the
/// sender) only on strict improvement.
UpdateOutcome accept_update(const NodeState& state, const Advertisement& adv, double link);

/// Whether `candidate` is worth advertising, judged against the state as it
/// was before the update that produced it. The baseline variant is the
/// significant-improvement gate with f = 1.
bool advertise_gate(double candidate, const NodeState& before, const ProtocolConfig& cfg);

/// Two-hop knowledge gathered in the setup phase of the neighbour-list
/// variant: for each node X, the listen lists of every neighbour of X.
/// `dominated(x, i)` caches the suppression verdict for the i-th entry of
/// x's listen list, since it depends only on static link costs.
class TwoHopTable {
 public:
  TwoHopTable() = default;
  /// Gathers every node's listen list (one setup broadcast per node) and
  /// evaluates the suppression rule for all edges in parallel.
  explicit TwoHopTable(const ListenGraph& graph);

  static TwoHopTable build_serial(const ListenGraph& graph);

  /// Listen list of neighbour z as learned by its listeners.
  std::span<const Link> neighbour_list(NodeId z) const { return lists_[z]; }
  bool dominated(NodeId x, std::size_t index) const { return dominated_[offset_[x] + index]; }
  std::size_t setup_messages() const { return lists_.size(); }

  friend bool operator==(const TwoHopTable&, const TwoHopTable&) = default;

 private:
  std::vector<std::vector<Link>> lists_;
  std::vector<std::size_t> offset_;
  std::vector<bool> dominated_;
};

/// True iff X should hold back an advertisement caused by `sender`: some
/// neighbour Z != sender of X also hears the sender and
/// C(X,Z) + C(Z,sender) < C(X,sender), so a strictly better estimate via Z is
/// on its way.
bool neighbour_list_suppress(NodeId x, NodeId sender, double link_to_sender,
                             const TwoHopTable& two_hop, const ListenGraph& graph);

/// time_sync release: estimate finite, v * t > estimate, nothing sent yet.
bool time_sync_release(const NodeState& state, TimeStep t, double v);

/// First step t with v * t > estimate (estimate must be finite).
TimeStep release_step(double estimate, double v);

}  // namespace sinkdir
