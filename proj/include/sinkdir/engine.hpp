#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sinkdir/protocol.hpp"
#include "sinkdir/rng.hpp"
#include "sinkdir/topology.hpp"

namespace sinkdir {

struct FinalNode {
  RouteCost estimate;
  std::optional<NodeId> pointer;
  std::uint32_t messages_sent = 0;
  /// Estimate right after the node's first accepted update.
  RouteCost first_estimate;
  /// Gate firings that found the transmission slot empty.
  std::uint32_t broadcasts_scheduled = 0;
};

struct RunResult {
  std::vector<FinalNode> final_states;
  /// per_step_tx[t] = transmissions at step t, for t in [0, converged_at).
  std::vector<std::uint32_t> per_step_tx;
  std::vector<Advertisement> tx_log;
  TimeStep converged_at = 0;
  std::uint64_t total_messages = 0;
  std::uint64_t setup_messages = 0;
};

struct RunOptions {
  /// Abort with LivelockError once the clock passes this many steps.
  TimeStep horizon = 10'000'000;
};

class LivelockError : public std::runtime_error {
 public:
  LivelockError(TimeStep clock, std::uint64_t messages);
  TimeStep clock() const { return clock_; }
  std::uint64_t messages() const { return messages_; }

 private:
  TimeStep clock_;
  std::uint64_t messages_;
};

/// Discrete-time simulation state for one run.
///
/// Construction performs step 0: the sink broadcasts cost 0. Each step()
/// then advances the clock by one and fires every transmission due at the
/// new clock, in ascending node id. A broadcast is processed by its
/// listeners in the same step, ascending by receiver id. After any call,
/// per_step_tx().size() == clock() + 1 and every pending fire time is
/// greater than clock().
class World {
 public:
  World(const ListenGraph& graph, ProtocolConfig cfg, std::uint64_t seed);

  void step();
  /// Quiescence: nothing pending, and under time_sync no reached node still
  /// waiting for its release.
  bool converged() const;

  TimeStep clock() const { return clock_; }
  const std::vector<NodeState>& states() const { return states_; }
  const std::vector<std::uint32_t>& per_step_tx() const { return per_step_tx_; }
  const std::vector<Advertisement>& tx_log() const { return tx_log_; }
  std::size_t pending_count() const { return pending_.size(); }
  /// Velocity in effect (time_sync only).
  double velocity() const { return velocity_; }

  RunResult result() const;

 private:
  struct Event {
    TimeStep time;
    NodeId node;
    friend bool operator>(const Event& l, const Event& r) {
      return l.time != r.time ? l.time > r.time : l.node > r.node;
    }
  };

  void transmit(NodeId sender);
  void deliver(NodeId receiver, const Advertisement& adv, double link);
  void schedule_transmission(NodeId node);
  void fire(NodeId node);
  bool live(const Event& e) const;
  void drop_stale();

  const ListenGraph* graph_;
  ProtocolConfig cfg_;
  Rng rng_;
  TwoHopTable two_hop_;
  double velocity_ = 0.0;
  TimeStep clock_ = 0;
  std::vector<NodeState> states_;
  std::vector<RouteCost> first_estimate_;
  std::vector<std::uint32_t> scheduled_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> pending_;
  std::vector<Advertisement> tx_log_;
  std::vector<std::uint32_t> per_step_tx_;
  std::uint32_t tx_this_step_ = 0;
};

/// Runs from the sink bootstrap to quiescence. Deterministic in
/// (graph, cfg, seed). Throws LivelockError past the horizon.
RunResult run(const ListenGraph& graph, const ProtocolConfig& cfg, std::uint64_t seed,
              const RunOptions& options = {});

void write_event_log_csv(std::ostream& out, const RunResult& result);
void write_step_series_csv(std::ostream& out, const RunResult& result);
void write_final_state_csv(std::ostream& out, const RunResult& result);

}  // namespace sinkdir
