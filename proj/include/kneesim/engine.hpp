#pragma once

#include <vector>

#include "kneesim/sim_types.hpp"

namespace kneesim::sim {

// One delivered packet, recorded in delivery order.
struct PacketRecord {
  int user_id = 0;
  long seq = 0;  // per-user send sequence number
  SimTime send_time = 0.0;
  SimTime delivery_time = 0.0;
  bool bit = false;               // congestion bit as returned to the source
  int max_queue_sample = 0;       // largest arrival-instant queue length seen
  int bottleneck_queue_at_delivery = 0;

  bool operator==(const PacketRecord&) const = default;
};

// Window trajectory entry: activation ('a'), up ('u') or down ('d').
struct WindowEvent {
  SimTime time = 0.0;
  long acks_seen = 0;  // user's delivered count when the event fired
  double w = 1.0;
  int w_used = 1;
  char direction = 'a';

  bool operator==(const WindowEvent&) const = default;
};

// Queue length observed by an arriving packet (system count excluding it).
struct QueueSample {
  SimTime time = 0.0;
  int node = 0;
  int length = 0;

  bool operator==(const QueueSample&) const = default;
};

struct UserTotals {
  long sent = 0;
  long delivered = 0;
  SimTime activation_time = 0.0;
  SimTime last_delivery = 0.0;
  bool activated = false;

  bool operator==(const UserTotals&) const = default;
};

struct RunRecord {
  std::vector<PacketRecord> packets;               // global delivery order
  std::vector<std::vector<WindowEvent>> windows;   // per user
  std::vector<QueueSample> queue_samples;
  std::vector<UserTotals> totals;
  SimTime end_time = 0.0;

  bool operator==(const RunRecord&) const = default;
};

// Service duration of a packet at a node: length / (rate * reference
// length). Throws std::domain_error for non-positive lengths.
double service_time(const PathNode& node, double packet_length,
                    double reference_length = 1.0);

// The node's rate while `delivered_fraction` of the configured total has
// been delivered: the transient's middle rate inside [1/3, 2/3), the
// configured rate elsewhere.
double effective_rate(const PathNode& node, const TransientSpec& transient,
                      double delivered_fraction);

// Runs one deterministic replication: every user sends its configured
// packets through the shared path under window control with forward
// feedback bits. Identical (config, seed) yields an identical RunRecord.
RunRecord run_simulation(const SimConfig& config);

}  // namespace kneesim::sim
