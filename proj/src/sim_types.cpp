#include "kneesim/sim_types.hpp"

#include <cmath>
#include <string>

#include "kneesim/errors.hpp"

namespace kneesim::sim {

void PacketLengthModel::validate() const {
  switch (kind) {
    case LengthKind::constant:
      if (!(length > 0.0)) throw ConfigError("constant length must be > 0");
      break;
    case LengthKind::uniform:
      if (!(lo > 0.0)) throw ConfigError("uniform lo must be > 0");
      if (hi < lo) throw ConfigError("uniform hi must be >= lo");
      break;
    case LengthKind::exponential:
      if (!(mean > 0.0)) throw ConfigError("exponential mean must be > 0");
      break;
    case LengthKind::bimodal:
      if (!(l1 > 0.0 && l2 > 0.0))
        throw ConfigError("bimodal lengths must be > 0");
      if (!(p1 >= 0.0 && p1 <= 1.0))
        throw ConfigError("bimodal p1 must lie in [0,1]");
      break;
    case LengthKind::erlang:
      if (!(mean > 0.0)) throw ConfigError("erlang mean must be > 0");
      if (shape < 1) throw ConfigError("erlang shape must be >= 1");
      break;
  }
}

double PacketLengthModel::mean_value() const {
  switch (kind) {
    case LengthKind::constant: return length;
    case LengthKind::uniform: return 0.5 * (lo + hi);
    case LengthKind::exponential: return mean;
    case LengthKind::bimodal: return p1 * l1 + (1.0 - p1) * l2;
    case LengthKind::erlang: return mean;
  }
  return 0.0;
}

double sample_packet_length(const PacketLengthModel& model, RngStream& rng) {
  model.validate();
  switch (model.kind) {
    case LengthKind::constant:
      return model.length;
    case LengthKind::uniform:
      return model.lo + rng.next_unit() * (model.hi - model.lo);
    case LengthKind::exponential:
      return -model.mean * std::log(rng.next_unit_positive());
    case LengthKind::bimodal:
      return rng.next_unit() < model.p1 ? model.l1 : model.l2;
    case LengthKind::erlang: {
      // Sum of `shape` exponentials with mean mean/shape.
      double product = 1.0;
      for (int i = 0; i < model.shape; ++i) product *= rng.next_unit_positive();
      return -(model.mean / model.shape) * std::log(product);
    }
  }
  return model.length;
}

bool PolicyBundle::operator==(const PolicyBundle& o) const {
  const auto& a = params;
  const auto& b = o.params;
  return a.increase_kind == b.increase_kind &&
         a.decrease_kind == b.decrease_kind && a.k1 == b.k1 && a.k2 == b.k2 &&
         a.r1 == b.r1 && a.r2 == b.r2 && a.rounding == b.rounding &&
         a.birth.active == b.birth.active &&
         a.birth.initial_k1 == b.birth.initial_k1 &&
         a.kary.enabled == b.kary.enabled && a.kary.k == b.kary.k &&
         detector_metric == o.detector_metric &&
         detector_gain == o.detector_gain &&
         detector_threshold == o.detector_threshold && cutoff == o.cutoff &&
         signal_weight_base == o.signal_weight_base &&
         warmup_rtts == o.warmup_rtts && fixed_window == o.fixed_window;
}

bool SimConfig::operator==(const SimConfig& o) const {
  return path == o.path && users == o.users && length_model == o.length_model &&
         reference_length == o.reference_length && transient == o.transient &&
         policy == o.policy && run_seed == o.run_seed;
}

void SimConfig::validate() const {
  if (path.empty()) throw ConfigError("path must contain at least one node");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].node_id != static_cast<int>(i))
      throw ConfigError("node_id must equal the node's position (node " +
                        std::to_string(i) + ")");
    if (!(path[i].service_rate > 0.0))
      throw ConfigError("service_rate must be > 0 (node " + std::to_string(i) +
                        ")");
    if (path[i].propagation_delay < 0.0)
      throw ConfigError("propagation_delay must be >= 0 (node " +
                        std::to_string(i) + ")");
  }
  if (users.empty()) throw ConfigError("at least one user is required");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const UserSpec& u = users[i];
    if (u.user_id != static_cast<int>(i))
      throw ConfigError("user ids must be 0..n-1 in order (user " +
                        std::to_string(i) + ")");
    if (u.total_packets <= 0)
      throw ConfigError("total_packets must be > 0 (user " +
                        std::to_string(i) + ")");
    if (u.w_max < 1)
      throw ConfigError("wmax must be >= 1 (user " + std::to_string(i) + ")");
    if (!(u.source_rate > 0.0))
      throw ConfigError("source_rate must be > 0 (user " + std::to_string(i) +
                        ")");
    if (u.initial_window < 1.0)
      throw ConfigError("initial_window must be >= 1 (user " +
                        std::to_string(i) + ")");
    if (u.start.predecessor >= 0) {
      if (u.start.predecessor >= static_cast<int>(users.size()) ||
          u.start.predecessor == static_cast<int>(i))
        throw ConfigError("start trigger references an invalid user (user " +
                          std::to_string(i) + ")");
      if (!(u.start.fraction > 0.0 && u.start.fraction < 1.0))
        throw ConfigError("start fraction must lie in (0,1) (user " +
                          std::to_string(i) + ")");
    }
  }
  // Start triggers must bottom out at a time-zero user: no cycles.
  for (std::size_t i = 0; i < users.size(); ++i) {
    int hops = 0, at = static_cast<int>(i);
    while (users[at].start.predecessor >= 0) {
      at = users[at].start.predecessor;
      if (++hops > static_cast<int>(users.size()))
        throw ConfigError("start triggers form a cycle");
    }
  }
  length_model.validate();
  if (!(reference_length > 0.0))
    throw ConfigError("reference_length must be > 0");
  if (transient.enabled) {
    if (transient.target_node < 0 ||
        transient.target_node >= static_cast<int>(path.size()))
      throw ConfigError("transient node index out of range");
    if (!(transient.middle_rate > 0.0))
      throw ConfigError("transient middle_rate must be > 0");
  }
  try {
    policy.params.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (!(policy.detector_gain > 0.0 && policy.detector_gain <= 1.0))
    throw ConfigError("detector_gain must lie in (0,1]");
  if (policy.detector_threshold < 0.0)
    throw ConfigError("detector_threshold must be >= 0");
  if (!(policy.cutoff > 0.0 && policy.cutoff <= 1.0))
    throw ConfigError("cutoff must lie in (0,1]");
  if (!(policy.signal_weight_base > 0.0))
    throw ConfigError("signal_weight_base must be > 0");
  if (policy.warmup_rtts < 0.0)
    throw ConfigError("warmup_rtts must be >= 0");
  if (policy.fixed_window < 0)
    throw ConfigError("fixed_window must be >= 0");
}

double SimConfig::base_round_trip() const {
  double rtt = 0.0;
  for (const PathNode& n : path)
    rtt += 1.0 / n.service_rate + n.propagation_delay;
  return rtt;
}

int SimConfig::bottleneck_node() const {
  int best = 0;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path[i].service_rate < path[best].service_rate)
      best = static_cast<int>(i);
  return best;
}

long SimConfig::total_configured_packets() const {
  long total = 0;
  for (const UserSpec& u : users) total += u.total_packets;
  return total;
}

}  // namespace kneesim::sim
