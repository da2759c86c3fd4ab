#pragma once

#include <optional>
#include <vector>

#include "kneesim/window_policy.hpp"

namespace kneesim::oracle {

// Perfect-feedback window model: n users share one path whose knee window
// is known exactly; every step the network signals "up" to everyone iff the
// sum of implemented windows is at or below the knee. Used as a brute-force
// oracle for fairness and convergence claims.

struct UserStart {
  long start_step = 0;
  double initial_w = 1.0;
};

struct OracleConfig {
  int n_users = 1;
  double w_knee = 1.0;
  policy::PolicyParams policy;
  std::vector<UserStart> starts;  // one per user
  long max_steps = 10000;
  int w_max = 1000000;

  void validate() const;
};

struct StepRecord {
  std::vector<double> w;       // computed windows (0 for inactive users)
  std::vector<int> w_used;     // implemented windows (0 for inactive users)
  bool signal_up = false;      // the signal this state produced
};

struct CycleInfo {
  long start_index = 0;
  long period = 0;
  std::vector<double> avg_w_used;  // per user, over one full cycle
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::optional<CycleInfo> cycle;
  bool divergence_flag = false;       // max w grew monotonically at the tail
  std::vector<double> tail_avg_w_used;  // fallback averages if no cycle

  const std::vector<double>& averages() const {
    return cycle ? cycle->avg_w_used : tail_avg_w_used;
  }
};

struct OracleUsers {
  std::vector<policy::WindowState> states;
  std::vector<policy::PolicyParams> params;
  std::vector<policy::KaryState> kary;
  std::vector<bool> active;
};

// True iff the sum of active users' implemented windows is <= w_knee.
bool signal_up(const OracleUsers& users, double w_knee);

// One synchronous round: every active user applies the increase branch when
// the signal is up, the decrease branch otherwise. Inactive users do not
// move and contribute nothing to the total.
void oracle_step(OracleUsers& users, double w_knee);

// Iterates oracle_step from the configured staggered starts; detects a
// limit cycle by exact state recurrence (w compared at 12 decimal digits)
// once all users are active.
Trajectory run_trajectory(const OracleConfig& config);

struct ScanInstance {
  double knee = 0.0;
  std::vector<double> starts;
  std::vector<double> averages;
  double fairness = 1.0;
};

struct ScanReport {
  double min_fairness = 1.0;
  double max_average_gap = 0.0;  // widest spread of per-user average windows
  ScanInstance worst;            // instance achieving min_fairness
  long instances = 0;
};

// Exhaustive fairness scan: one trajectory per (knee, start vector) grid
// point, all users starting simultaneously at the given initial windows.
ScanReport scan_fairness(const std::vector<double>& knee_grid,
                         const std::vector<std::vector<double>>& start_grid,
                         const policy::PolicyParams& policy,
                         long max_steps = 4000);

}  // namespace kneesim::oracle
