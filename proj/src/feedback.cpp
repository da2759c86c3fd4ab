#include "kneesim/feedback.hpp"

#include <stdexcept>

namespace kneesim::feedback {

double ewma_update(double avg, double sample, double gain) {
  if (!(gain > 0.0 && gain <= 1.0))
    throw std::domain_error("ewma gain must lie in (0, 1]");
  return (1.0 - gain) * avg + gain * sample;
}

DetectResult detect_overload(const DetectorState& state, double raw_sample) {
  DetectResult r;
  r.state = state;
  r.state.ewma_value = ewma_update(state.ewma_value, raw_sample, state.gain);
  r.overloaded = r.state.ewma_value >= state.threshold;
  return r;
}

FeedbackBit stamp(FeedbackBit bit, bool node_overloaded) {
  return FeedbackBit{bit.set || node_overloaded};
}

std::set<int> select_recipients(SelectorKind kind,
                                const std::set<int>& users_on_node) {
  switch (kind) {
    case SelectorKind::all_users:
      return users_on_node;
  }
  return users_on_node;
}

}  // namespace kneesim::feedback
