#include "sinkdir/engine.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

namespace sinkdir {

LivelockError::LivelockError(TimeStep clock, std::uint64_t messages)
    : std::runtime_error("no quiescence after " + std::to_string(clock) + " steps (" +
                         std::to_string(messages) + " messages sent); livelock suspected"),
      clock_(clock),
      messages_(messages) {}

World::World(const ListenGraph& graph, ProtocolConfig cfg, std::uint64_t seed)
    : graph_(&graph), cfg_(cfg), rng_(seed) {
  cfg_.validate();
  const std::size_t n = graph.size();
  if (n == 0) throw std::invalid_argument("run: empty graph");
  states_.resize(n);
  first_estimate_.resize(n);
  scheduled_.assign(n, 0);

  if (cfg_.variant == Variant::neighbour_list) two_hop_ = TwoHopTable(graph);
  if (cfg_.variant == Variant::time_sync) {
    const auto min_link = graph.min_positive_link();
    velocity_ = cfg_.v ? *cfg_.v
                       : min_link.value_or(1.0) / static_cast<double>(cfg_.delay_max + 1);
  }

  // Step 0: the sink advertises cost 0.
  const NodeId sink = graph.sink();
  states_[sink].estimate = RouteCost::of(0.0);
  first_estimate_[sink] = states_[sink].estimate;
  scheduled_[sink] = 1;
  transmit(sink);
  per_step_tx_.push_back(tx_this_step_);
  drop_stale();
}

void World::step() {
  ++clock_;
  tx_this_step_ = 0;
  while (!pending_.empty() && pending_.top().time == clock_) {
    const NodeId node = pending_.top().node;
    pending_.pop();
    fire(node);
  }
  per_step_tx_.push_back(tx_this_step_);
  drop_stale();
}

bool World::converged() const {
  if (!pending_.empty()) return false;
  if (cfg_.variant != Variant::time_sync) return true;
  return std::none_of(states_.begin(), states_.end(), [](const NodeState& s) {
    return s.estimate.reached() && s.messages_sent == 0;
  });
}

bool World::live(const Event& e) const {
  const NodeState& s = states_[e.node];
  if (s.pending_tx) return *s.pending_tx == e.time;
  return s.release_at && *s.release_at == e.time && s.messages_sent == 0;
}

void World::drop_stale() {
  while (!pending_.empty() && !live(pending_.top())) pending_.pop();
}

void World::fire(NodeId node) {
  NodeState& s = states_[node];
  if (s.pending_tx && *s.pending_tx == clock_) {
    transmit(node);
  } else if (!s.pending_tx && s.release_at && *s.release_at == clock_ &&
             time_sync_release(s, clock_, velocity_)) {
    s.release_at.reset();
    schedule_transmission(node);
  }
}

void World::transmit(NodeId sender) {
  NodeState& s = states_[sender];
  const Advertisement adv{sender, s.estimate.value(), clock_};
  s.pending_tx.reset();
  s.last_advertised = s.estimate;
  ++s.messages_sent;
  tx_log_.push_back(adv);
  ++tx_this_step_;
  for (const Link& l : graph_->listeners(sender)) deliver(l.node, adv, l.cost);
}

void World::deliver(NodeId receiver, const Advertisement& adv, double link) {
  const NodeState before = states_[receiver];
  const UpdateOutcome out = accept_update(before, adv, link);
  NodeState& s = states_[receiver];
  s = out.state;
  if (out.improved && !first_estimate_[receiver].reached()) first_estimate_[receiver] = s.estimate;

  switch (cfg_.variant) {
    case Variant::time_sync: {
      if (!out.improved || s.messages_sent > 0 || s.pending_tx) return;
      const TimeStep t = std::max(release_step(s.estimate.value(), velocity_), clock_ + 1);
      s.release_at = t;
      pending_.push({t, receiver});
      return;
    }
    case Variant::neighbour_list: {
      if (!out.improved || !advertise_gate(out.candidate, before, cfg_) || s.pending_tx) return;
      const auto list = graph_->listen_list(receiver);
      const auto it = std::find_if(list.begin(), list.end(),
                                   [&](const Link& l) { return l.node == adv.sender; });
      const auto index = static_cast<std::size_t>(it - list.begin());
      if (two_hop_.dominated(receiver, index)) {
        s.suppressed_by = adv.sender;
      } else {
        s.suppressed_by.reset();
        schedule_transmission(receiver);
      }
      return;
    }
    case Variant::baseline:
    case Variant::gated:
      if (advertise_gate(out.candidate, before, cfg_)) schedule_transmission(receiver);
      return;
  }
}

void World::schedule_transmission(NodeId node) {
  NodeState& s = states_[node];
  if (s.pending_tx) return;
  const TimeStep t = clock_ + rng_.uniform_int(cfg_.delay_min, cfg_.delay_max);
  s.pending_tx = t;
  ++scheduled_[node];
  pending_.push({t, node});
}

RunResult World::result() const {
  RunResult r;
  r.final_states.reserve(states_.size());
  for (NodeId id = 0; id < states_.size(); ++id) {
    const NodeState& s = states_[id];
    r.final_states.push_back({s.estimate, s.pointer, s.messages_sent, first_estimate_[id],
                              scheduled_[id]});
  }
  r.per_step_tx = per_step_tx_;
  r.tx_log = tx_log_;
  r.converged_at = clock_ + 1;
  r.total_messages = tx_log_.size();
  if (cfg_.variant == Variant::neighbour_list) r.setup_messages = two_hop_.setup_messages();
  return r;
}

RunResult run(const ListenGraph& graph, const ProtocolConfig& cfg, std::uint64_t seed,
              const RunOptions& options) {
  World world(graph, cfg, seed);
  while (!world.converged()) {
    if (world.clock() >= options.horizon)
      throw LivelockError(world.clock(), world.tx_log().size());
    world.step();
  }
  return world.result();
}

void write_event_log_csv(std::ostream& out, const RunResult& result) {
  out << "time,sender,value\n" << std::setprecision(17);
  for (const Advertisement& a : result.tx_log)
    out << a.sent_at << ',' << a.sender << ',' << a.value << '\n';
}

void write_step_series_csv(std::ostream& out, const RunResult& result) {
  out << "time,tx_count\n";
  for (std::size_t t = 0; t < result.per_step_tx.size(); ++t)
    out << t << ',' << result.per_step_tx[t] << '\n';
}

void write_final_state_csv(std::ostream& out, const RunResult& result) {
  out << "id,estimate,pointer,messages_sent\n" << std::setprecision(17);
  for (NodeId id = 0; id < result.final_states.size(); ++id) {
    const FinalNode& s = result.final_states[id];
    out << id << ',';
    if (s.estimate.reached()) out << s.estimate.value();
    out << ',';
    if (s.pointer) out << *s.pointer;
    out << ',' << s.messages_sent << '\n';
  }
}

}  // namespace sinkdir
