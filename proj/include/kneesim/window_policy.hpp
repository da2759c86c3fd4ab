#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace kneesim::policy {

enum class Direction { up, down, none };
enum class LoadLevel { underload, overload };
enum class StepKind { additive, multiplicative };
enum class Rounding { round_half_up, truncate };

// One user's window control state. w is the computed (real valued) window;
// w_used is the implemented (integer) window that actually clocks packets.
// Under round_half_up, w stays real and w_used = floor(w + 0.5). Under
// truncate the window is maintained as an integer: each update computes from
// w_used, stores the freshly computed real value in w for inspection, and
// truncates it into w_used.
struct WindowState {
  double w = 1.0;
  int w_used = 1;
  int w_max = 64;
  Direction last_direction = Direction::none;
};

// A larger increase amount used only until the first decrease, so a cold
// start reaches the operating point faster.
struct BirthPolicy {
  bool active = false;
  double initial_k1 = 2.0;
};

// Bracketing search for the operating point: remembers the lowest and
// highest windows at which the direction changed and jumps within them.
struct KarySearch {
  bool enabled = false;
  double k = 2.0;
};

struct PolicyParams {
  StepKind increase_kind = StepKind::additive;
  StepKind decrease_kind = StepKind::multiplicative;
  double k1 = 1.0;   // additive increase amount
  double k2 = 1.0;   // additive decrease amount
  double r1 = 1.25;  // multiplicative increase factor, > 1
  double r2 = 0.875; // multiplicative decrease factor, in (0,1)
  Rounding rounding = Rounding::round_half_up;
  BirthPolicy birth;
  KarySearch kary;

  void validate() const;  // throws std::domain_error on out-of-range values
};

// Bracket state for the k-ary search. w_low <= w_high always.
struct KaryState {
  double w_low = 1.0;
  double w_high = 1.0;
};

// Combines one cycle's worth of feedback bits into a load level. Overload
// iff the (weighted) fraction of set bits reaches the cutoff; default
// cutoff 0.5 is majority voting, 0.75 three-quarter majority. weights, when
// given, must match bits in length (index 0 = oldest signal).
// Throws NoSignalError on an empty bit list.
LoadLevel filter_signals(const std::vector<bool>& bits, double cutoff = 0.5,
                         const std::vector<double>* weights = nullptr);

// Two-way decision, no postponement: underload -> up, overload -> down.
Direction decide(LoadLevel level);

// The recommended window adjustment: additive increase by 1, capped at one
// above the last used window and at the destination limit; multiplicative
// decrease by 0.875, never below 1. Round-half-up rounding.
WindowState aimd_increase(WindowState state);
WindowState aimd_decrease(WindowState state);

// General increase/decrease family. On increase the computed window is also
// capped by the previously used window (w_used + k1 for additive increase,
// w_used * r1 for multiplicative), so the computed value cannot run away
// when the user is unable to implement it. With default params this
// coincides with aimd_increase/aimd_decrease.
WindowState apply_policy(const PolicyParams& params, Direction direction,
                         WindowState state);

// Next window the k-ary search probes: w_low + (w_high - w_low) / k.
double kary_next(const KaryState& ks, double k);

// While birth is active, increases use birth.initial_k1; the first down
// decision deactivates birth permanently and the base k1 applies afterward.
std::pair<WindowState, PolicyParams> birth_step(const PolicyParams& params,
                                                const WindowState& state,
                                                Direction direction);

// Update driver shared by the simulator and the perfect-feedback model:
// dispatches to the k-ary search, the birth policy, or the plain policy,
// mutating params (birth deactivation) and kary brackets as needed.
WindowState advance_window(PolicyParams& params, KaryState& kary,
                           Direction direction, WindowState state);

// Window update pacing: after each adjustment the user keeps the window
// constant for two window turns. The first turn's acknowledgments are
// discarded (their feedback reflects the old window); the second turn's
// bits are collected and returned for the decision.
struct CycleLedger {
  enum class Phase { settling, measuring };
  Phase phase = Phase::settling;
  int remaining = 0;  // acknowledgments left in the current phase
  std::vector<bool> bits;
};

CycleLedger make_ledger(int w_used);

// Feeds one acknowledgment's bit through the ledger. Returns the collected
// bits when a measuring phase completes; the caller then adjusts the window
// and must reset the ledger with make_ledger(new w_used).
std::pair<CycleLedger, std::optional<std::vector<bool>>> cycle_advance(
    CycleLedger ledger, bool ack_bit, int w_used);

// floor(x + 0.5), the rounding used for implemented windows.
int round_half_up(double x);

}  // namespace kneesim::policy
