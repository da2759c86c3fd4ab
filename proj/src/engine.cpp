#include "kneesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

namespace kneesim::sim {

double service_time(const PathNode& node, double packet_length,
                    double reference_length) {
  if (!(packet_length > 0.0))
    throw std::domain_error("packet length must be > 0");
  return packet_length / (node.service_rate * reference_length);
}

double effective_rate(const PathNode& node, const TransientSpec& transient,
                      double delivered_fraction) {
  if (transient.enabled && node.node_id == transient.target_node &&
      delivered_fraction >= 1.0 / 3.0 && delivered_fraction < 2.0 / 3.0)
    return transient.middle_rate;
  return node.service_rate;
}

namespace {

struct Packet {
  int user = 0;
  long seq = 0;
  double length = 1.0;
  SimTime send_time = 0.0;
  feedback::FeedbackBit bit;
  int max_queue_sample = 0;
};

enum class EvKind : int { arrival = 0, service_complete = 1, source_wakeup = 2 };

// Deterministic ordering: (time, node index, event kind, push sequence).
// Arrivals sort ahead of same-instant completions at a node, so a packet
// arriving exactly when its predecessor departs still observes it.
struct Event {
  SimTime time = 0.0;
  int node = 0;  // destination index == path size means delivery; -1 = source
  EvKind kind = EvKind::arrival;
  std::uint64_t push_seq = 0;
  int user = -1;   // source_wakeup target
  Packet packet;   // arrival payload
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.node != b.node) return a.node > b.node;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.push_seq > b.push_seq;
  }
};

struct NodeRt {
  std::deque<Packet> queue;  // front = in service
  feedback::DetectorState detector;
};

struct UserRt {
  const UserSpec* spec = nullptr;
  bool active = false;
  long sent = 0;
  long delivered = 0;
  int in_flight = 0;
  int max_in_flight = 0;  // attained window since the last adjustment
  SimTime source_free = 0.0;
  bool wakeup_pending = false;
  policy::WindowState win;
  policy::PolicyParams params;
  policy::KaryState kary;
  policy::CycleLedger ledger;
  RngStream lengths;
};

class Engine {
 public:
  explicit Engine(const SimConfig& config) : cfg_(config) {
    cfg_.validate();
    nodes_.resize(cfg_.path.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& d = nodes_[i].detector;
      d.node_id = static_cast<int>(i);
      d.gain = cfg_.policy.detector_gain;
      d.threshold = cfg_.policy.detector_threshold;
      d.metric = cfg_.policy.detector_metric;
    }
    users_.resize(cfg_.users.size());
    record_.windows.resize(cfg_.users.size());
    record_.totals.resize(cfg_.users.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      users_[i].spec = &cfg_.users[i];
      users_[i].params = cfg_.policy.params;
      users_[i].lengths = RngStream(cfg_.run_seed, i);
    }
    total_to_deliver_ = cfg_.total_configured_packets();
    bottleneck_ = cfg_.bottleneck_node();
    if (cfg_.policy.signal_weight_base != 1.0) weighted_ = true;
  }

  RunRecord run() {
    for (std::size_t i = 0; i < users_.size(); ++i)
      if (cfg_.users[i].start.predecessor < 0) activate(static_cast<int>(i), 0.0);
    while (!events_.empty() && delivered_total_ < total_to_deliver_) {
      Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EvKind::arrival: handle_arrival(ev); break;
        case EvKind::service_complete: handle_service_complete(ev); break;
        case EvKind::source_wakeup: handle_wakeup(ev); break;
      }
    }
    record_.end_time = now_;
    return std::move(record_);
  }

 private:
  void push(Event ev) {
    ev.push_seq = next_push_++;
    events_.push(std::move(ev));
  }

  void activate(int u, SimTime t) {
    UserRt& ur = users_[u];
    ur.active = true;
    ur.win.w = std::min(ur.spec->initial_window,
                        static_cast<double>(ur.spec->w_max));
    ur.win.w_max = ur.spec->w_max;
    if (cfg_.policy.fixed_window > 0)
      ur.win.w = std::min(static_cast<double>(cfg_.policy.fixed_window),
                          static_cast<double>(ur.spec->w_max));
    ur.win.w_used = std::clamp(policy::round_half_up(ur.win.w), 1,
                               ur.spec->w_max);
    ur.kary.w_low = 1.0;
    ur.kary.w_high = static_cast<double>(ur.spec->w_max);
    ur.ledger = policy::make_ledger(ur.win.w_used);
    record_.totals[u].activation_time = t;
    record_.totals[u].activated = true;
    record_.windows[u].push_back({t, 0, ur.win.w, ur.win.w_used, 'a'});
    try_send(u, t);
  }

  void try_send(int u, SimTime t) {
    UserRt& ur = users_[u];
    while (ur.active && ur.sent < ur.spec->total_packets &&
           ur.in_flight < ur.win.w_used && t >= ur.source_free) {
      Packet p;
      p.user = u;
      p.seq = ur.sent;
      p.length = sample_packet_length(cfg_.length_model, ur.lengths);
      p.send_time = t;
      ur.sent += 1;
      ur.in_flight += 1;
      ur.max_in_flight = std::max(ur.max_in_flight, ur.in_flight);
      record_.totals[u].sent = ur.sent;
      if (ur.spec->source_rate != kInfiniteRate)
        ur.source_free =
            t + p.length / (ur.spec->source_rate * cfg_.reference_length);
      push({t, 0, EvKind::arrival, 0, -1, std::move(p)});
      check_start_triggers(u, t);
    }
    if (ur.active && ur.sent < ur.spec->total_packets &&
        ur.in_flight < ur.win.w_used && t < ur.source_free &&
        !ur.wakeup_pending) {
      ur.wakeup_pending = true;
      push({ur.source_free, -1, EvKind::source_wakeup, 0, u, {}});
    }
  }

  void check_start_triggers(int sender, SimTime t) {
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (users_[i].active) continue;
      const StartTrigger& st = cfg_.users[i].start;
      if (st.predecessor == sender &&
          static_cast<double>(users_[sender].sent) >=
              st.fraction * static_cast<double>(users_[sender].spec->total_packets))
        activate(static_cast<int>(i), t);
    }
  }

  void handle_wakeup(const Event& ev) {
    users_[ev.user].wakeup_pending = false;
    try_send(ev.user, ev.time);
  }

  void handle_arrival(Event& ev) {
    if (ev.node == static_cast<int>(nodes_.size())) {
      deliver(ev.packet, ev.time);
      return;
    }
    NodeRt& node = nodes_[ev.node];
    int queue_len = static_cast<int>(node.queue.size());
    double raw = node.detector.metric == feedback::LoadMetric::queue_length
                     ? static_cast<double>(queue_len)
                     : (queue_len > 0 ? 1.0 : 0.0);
    auto det = feedback::detect_overload(node.detector, raw);
    node.detector = det.state;
    ev.packet.bit = feedback::stamp(ev.packet.bit, det.overloaded);
    ev.packet.max_queue_sample =
        std::max(ev.packet.max_queue_sample, queue_len);
    record_.queue_samples.push_back({ev.time, ev.node, queue_len});
    node.queue.push_back(std::move(ev.packet));
    if (node.queue.size() == 1) start_service(ev.node, ev.time);
  }

  void start_service(int n, SimTime t) {
    double fraction = total_to_deliver_ > 0
                          ? static_cast<double>(delivered_total_) /
                                static_cast<double>(total_to_deliver_)
                          : 0.0;
    PathNode effective = cfg_.path[n];
    effective.service_rate =
        effective_rate(cfg_.path[n], cfg_.transient, fraction);
    double dur = service_time(effective, nodes_[n].queue.front().length,
                              cfg_.reference_length);
    push({t + dur, n, EvKind::service_complete, 0, -1, {}});
  }

  void handle_service_complete(const Event& ev) {
    NodeRt& node = nodes_[ev.node];
    Packet p = std::move(node.queue.front());
    node.queue.pop_front();
    if (!node.queue.empty()) start_service(ev.node, ev.time);
    SimTime next_t = ev.time + cfg_.path[ev.node].propagation_delay;
    push({next_t, ev.node + 1, EvKind::arrival, 0, -1, std::move(p)});
  }

  // Delivery also acknowledges: the source learns of it (and gets the
  // packet's feedback bit) instantly; reverse traffic is not simulated.
  void deliver(const Packet& p, SimTime t) {
    UserRt& ur = users_[p.user];
    ur.in_flight -= 1;
    ur.delivered += 1;
    delivered_total_ += 1;
    record_.totals[p.user].delivered = ur.delivered;
    record_.totals[p.user].last_delivery = t;
    PacketRecord pr;
    pr.user_id = p.user;
    pr.seq = p.seq;
    pr.send_time = p.send_time;
    pr.delivery_time = t;
    pr.bit = p.bit.set;
    pr.max_queue_sample = p.max_queue_sample;
    pr.bottleneck_queue_at_delivery =
        static_cast<int>(nodes_[bottleneck_].queue.size());
    record_.packets.push_back(pr);
    if (cfg_.policy.fixed_window == 0) {
      auto [ledger, due] =
          policy::cycle_advance(std::move(ur.ledger), p.bit.set, ur.win.w_used);
      ur.ledger = std::move(ledger);
      if (due) adjust_window(p.user, *due, t);
    }
    try_send(p.user, t);
  }

  void adjust_window(int u, const std::vector<bool>& bits, SimTime t) {
    UserRt& ur = users_[u];
    std::vector<double> weights;
    const std::vector<double>* wp = nullptr;
    if (weighted_) {
      weights.resize(bits.size());
      double w = 1.0;
      for (std::size_t i = bits.size(); i-- > 0;) {
        weights[i] = w;  // most recent bit carries the largest weight
        w /= cfg_.policy.signal_weight_base;
      }
      wp = &weights;
    }
    policy::Direction dir =
        policy::decide(policy::filter_signals(bits, cfg_.policy.cutoff, wp));
    // A source that could not fill its granted window must not grow the
    // computed window past what it attained plus one increment.
    policy::WindowState in = ur.win;
    in.w_used = std::clamp(std::min(ur.win.w_used, ur.max_in_flight), 1,
                           ur.win.w_max);
    policy::WindowState out = policy::advance_window(ur.params, ur.kary, dir, in);
    out.w_max = ur.win.w_max;
    ur.win = out;
    ur.max_in_flight = ur.in_flight;
    ur.ledger = policy::make_ledger(ur.win.w_used);
    record_.windows[u].push_back({t, ur.delivered, ur.win.w, ur.win.w_used,
                                  dir == policy::Direction::up ? 'u' : 'd'});
  }

  SimConfig cfg_;
  std::vector<NodeRt> nodes_;
  std::vector<UserRt> users_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  RunRecord record_;
  SimTime now_ = 0.0;
  std::uint64_t next_push_ = 0;
  long delivered_total_ = 0;
  long total_to_deliver_ = 0;
  int bottleneck_ = 0;
  bool weighted_ = false;
};

}  // namespace

RunRecord run_simulation(const SimConfig& config) {
  Engine engine(config);
  return engine.run();
}

}  // namespace kneesim::sim
