#pragma once

#include <set>

namespace kneesim::feedback {

// Which load signal a node's detector watches.
enum class LoadMetric { queue_length, utilization };

// Per-node congestion detector: a low-pass (exponentially weighted average)
// filter over a raw load sample, compared against a threshold. gain = 1
// disables smoothing. The raw sample is either the queue length seen by an
// arriving packet (including the one in service) or the busy indicator.
struct DetectorState {
  int node_id = 0;
  double ewma_value = 0.0;
  double gain = 1.0;
  double threshold = 1.0;
  LoadMetric metric = LoadMetric::queue_length;
};

// (1 - gain) * avg + gain * sample. gain must lie in (0, 1].
double ewma_update(double avg, double sample, double gain);

struct DetectResult {
  bool overloaded = false;
  DetectorState state;
};

// Feeds one raw sample through the filter; overloaded iff the new filtered
// value is at or above the threshold.
DetectResult detect_overload(const DetectorState& state, double raw_sample);

// The congestion bit carried in every packet header. Once set along a path
// it is never cleared downstream.
struct FeedbackBit {
  bool set = false;
};

FeedbackBit stamp(FeedbackBit bit, bool node_overloaded);

enum class SelectorKind { all_users };

// Which users a node's feedback reaches. all_users notifies every user
// sharing the node.
std::set<int> select_recipients(SelectorKind kind,
                                const std::set<int>& users_on_node);

}  // namespace kneesim::feedback
