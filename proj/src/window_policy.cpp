#include "kneesim/window_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kneesim/errors.hpp"

namespace kneesim::policy {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void PolicyParams::validate() const {
  if (!(k1 > 0.0)) throw std::domain_error("k1 must be > 0");
  if (!(k2 > 0.0)) throw std::domain_error("k2 must be > 0");
  if (!(r1 > 1.0)) throw std::domain_error("r1 must be > 1");
  if (!(r2 > 0.0 && r2 < 1.0)) throw std::domain_error("r2 must be in (0,1)");
  if (birth.active && !(birth.initial_k1 > 0.0))
    throw std::domain_error("birth increase amount must be > 0");
  if (kary.enabled && !(kary.k > 1.0))
    throw std::domain_error("kary k must be > 1");
  if (kary.enabled && birth.active)
    throw std::domain_error("birth policy and k-ary search are exclusive");
}

LoadLevel filter_signals(const std::vector<bool>& bits, double cutoff,
                         const std::vector<double>* weights) {
  if (bits.empty()) throw NoSignalError();
  if (!(cutoff > 0.0 && cutoff <= 1.0))
    throw std::domain_error("cutoff must lie in (0, 1]");
  if (weights && weights->size() != bits.size())
    throw std::domain_error("weights must match bit count");
  double total = 0.0, set = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    double wt = weights ? (*weights)[i] : 1.0;
    if (!(wt > 0.0)) throw std::domain_error("weights must be positive");
    total += wt;
    if (bits[i]) set += wt;
  }
  return set / total >= cutoff ? LoadLevel::overload : LoadLevel::underload;
}

Direction decide(LoadLevel level) {
  return level == LoadLevel::overload ? Direction::down : Direction::up;
}

namespace {

// Clamp the computed window into [1, w_max] and derive the implemented one.
WindowState finish(WindowState s, double new_w, Rounding rounding,
                   Direction dir) {
  if (new_w < 1.0) new_w = 1.0;
  if (new_w > s.w_max) new_w = s.w_max;
  s.w = new_w;
  int used = rounding == Rounding::truncate
                 ? static_cast<int>(std::floor(new_w))
                 : round_half_up(new_w);
  s.w_used = std::clamp(used, 1, s.w_max);
  s.last_direction = dir;
  return s;
}

}  // namespace

WindowState aimd_increase(WindowState state) {
  PolicyParams defaults;
  return apply_policy(defaults, Direction::up, state);
}

WindowState aimd_decrease(WindowState state) {
  PolicyParams defaults;
  return apply_policy(defaults, Direction::down, state);
}

WindowState apply_policy(const PolicyParams& params, Direction direction,
                         WindowState state) {
  params.validate();
  if (direction == Direction::none)
    throw std::domain_error("apply_policy needs an up or down direction");
  // Truncate mode maintains the window as an integer: the arithmetic input
  // is the implemented window, not the (stale) real value.
  double w_in = params.rounding == Rounding::truncate
                    ? static_cast<double>(state.w_used)
                    : state.w;
  double w_out;
  if (direction == Direction::up) {
    if (params.increase_kind == StepKind::additive) {
      w_out = std::min(w_in + params.k1, state.w_used + params.k1);
    } else {
      w_out = std::min(params.r1 * w_in, params.r1 * state.w_used);
    }
  } else {
    w_out = params.decrease_kind == StepKind::additive ? w_in - params.k2
                                                       : params.r2 * w_in;
  }
  return finish(state, w_out, params.rounding, direction);
}

double kary_next(const KaryState& ks, double k) {
  if (!(k > 1.0)) throw std::domain_error("kary k must be > 1");
  if (!(ks.w_low <= ks.w_high))
    throw std::domain_error("kary bracket must satisfy w_low <= w_high");
  return ks.w_low + (ks.w_high - ks.w_low) / k;
}

std::pair<WindowState, PolicyParams> birth_step(const PolicyParams& params,
                                                const WindowState& state,
                                                Direction direction) {
  PolicyParams next = params;
  PolicyParams effective = params;
  if (params.birth.active && direction == Direction::up)
    effective.k1 = params.birth.initial_k1;
  if (direction == Direction::down) next.birth.active = false;
  return {apply_policy(effective, direction, state), next};
}

WindowState advance_window(PolicyParams& params, KaryState& kary,
                           Direction direction, WindowState state) {
  if (params.kary.enabled) {
    // Underload means the operating point lies above the current window,
    // overload that it lies below; either way the current computed window
    // becomes the corresponding bracket.
    if (direction == Direction::up)
      kary.w_low = state.w;
    else
      kary.w_high = state.w;
    if (kary.w_low > kary.w_high) std::swap(kary.w_low, kary.w_high);
    double w_out = kary_next(kary, params.kary.k);
    WindowState s = state;
    if (w_out < 1.0) w_out = 1.0;
    if (w_out > s.w_max) w_out = s.w_max;
    s.w = w_out;
    int used = params.rounding == Rounding::truncate
                   ? static_cast<int>(std::floor(w_out))
                   : round_half_up(w_out);
    s.w_used = std::clamp(used, 1, s.w_max);
    s.last_direction = direction;
    return s;
  }
  if (params.birth.active) {
    auto [s, p] = birth_step(params, state, direction);
    params = p;
    return s;
  }
  return apply_policy(params, direction, state);
}

CycleLedger make_ledger(int w_used) {
  CycleLedger l;
  l.phase = CycleLedger::Phase::settling;
  l.remaining = std::max(w_used, 1);
  return l;
}

std::pair<CycleLedger, std::optional<std::vector<bool>>> cycle_advance(
    CycleLedger ledger, bool ack_bit, int w_used) {
  if (ledger.phase == CycleLedger::Phase::settling) {
    if (--ledger.remaining <= 0) {
      ledger.phase = CycleLedger::Phase::measuring;
      ledger.remaining = std::max(w_used, 1);
      ledger.bits.clear();
    }
    return {std::move(ledger), std::nullopt};
  }
  ledger.bits.push_back(ack_bit);
  if (--ledger.remaining <= 0) {
    std::vector<bool> due = std::move(ledger.bits);
    // Caller resets via make_ledger after adjusting; leave a settling shell.
    ledger = make_ledger(w_used);
    return {std::move(ledger), std::move(due)};
  }
  return {std::move(ledger), std::nullopt};
}

}  // namespace kneesim::policy
