#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "kneesim/feedback.hpp"
#include "kneesim/rng.hpp"
#include "kneesim/window_policy.hpp"

namespace kneesim::sim {

using SimTime = double;

// One hop of the shared path: a FIFO queue with a service rate given in
// reference-length packets per second, followed by a constant propagation
// delay (zero for ordinary routers, positive for a satellite hop). Buffers
// are unbounded; packets are never lost.
struct PathNode {
  int node_id = 0;
  double service_rate = 1.0;
  double propagation_delay = 0.0;

  bool operator==(const PathNode&) const = default;
};

enum class LengthKind { constant, uniform, exponential, bimodal, erlang };

struct PacketLengthModel {
  LengthKind kind = LengthKind::constant;
  double length = 1.0;            // constant
  double lo = 0.0, hi = 0.0;      // uniform
  double mean = 1.0;              // exponential, erlang
  double l1 = 0.0, l2 = 0.0;      // bimodal lengths
  double p1 = 0.0;                // bimodal probability of l1
  int shape = 1;                  // erlang shape

  void validate() const;          // throws ConfigError
  double mean_value() const;

  bool operator==(const PacketLengthModel&) const = default;
};

double sample_packet_length(const PacketLengthModel& model, RngStream& rng);

// predecessor < 0 means the user starts at time zero; otherwise the user
// activates once the predecessor has sent `fraction` of its packets.
struct StartTrigger {
  int predecessor = -1;
  double fraction = 0.0;

  bool operator==(const StartTrigger&) const = default;
};

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

struct UserSpec {
  int user_id = 0;
  long total_packets = 1000;
  StartTrigger start;
  int w_max = 64;                 // destination-granted window limit
  double source_rate = kInfiniteRate;  // reference packets/s; inf = unbounded
  double initial_window = 1.0;

  bool operator==(const UserSpec&) const = default;
};

// During the middle third of the run (measured in delivered packets out of
// the configured total) the target node's service rate is replaced.
struct TransientSpec {
  bool enabled = false;
  int target_node = 0;
  double middle_rate = 1.0;

  bool operator==(const TransientSpec&) const = default;
};

// Policy selections shared by all users of a run: the window adjustment
// family, the user-side signal filter, the node-side detector, and the
// measurement conventions.
struct PolicyBundle {
  policy::PolicyParams params;
  feedback::LoadMetric detector_metric = feedback::LoadMetric::queue_length;
  double detector_gain = 1.0;
  double detector_threshold = 1.0;
  double cutoff = 0.5;              // signal filter majority cutoff
  double signal_weight_base = 1.0;  // >1 weights recent bits higher; 1=uniform
  double warmup_rtts = 2.0;         // statistics skip this many base RTTs
  int fixed_window = 0;             // >0 pins every window (adaptation off)

  bool operator==(const PolicyBundle& o) const;
};

struct SimConfig {
  std::vector<PathNode> path;
  std::vector<UserSpec> users;
  PacketLengthModel length_model;
  double reference_length = 1.0;
  TransientSpec transient;
  PolicyBundle policy;
  std::uint64_t run_seed = 1;

  void validate() const;  // throws ConfigError before any event executes
  // Round-trip of an empty path at reference length: sum of service times
  // and propagation delays.
  double base_round_trip() const;
  // Index of the slowest node (ties break toward the front).
  int bottleneck_node() const;
  long total_configured_packets() const;

  bool operator==(const SimConfig& o) const;
};

}  // namespace kneesim::sim
