#include "kneesim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "kneesim/metrics.hpp"

namespace kneesim::oracle {

void OracleConfig::validate() const {
  if (n_users < 1) throw std::domain_error("need at least one user");
  if (!(w_knee > 0.0)) throw std::domain_error("w_knee must be > 0");
  if (static_cast<int>(starts.size()) != n_users)
    throw std::domain_error("one start entry per user is required");
  for (const UserStart& s : starts) {
    if (s.start_step < 0) throw std::domain_error("start_step must be >= 0");
    if (s.initial_w < 1.0) throw std::domain_error("initial_w must be >= 1");
  }
  if (max_steps < 1) throw std::domain_error("max_steps must be >= 1");
  if (w_max < 1) throw std::domain_error("w_max must be >= 1");
  policy.validate();
}

bool signal_up(const OracleUsers& users, double w_knee) {
  long total = 0;
  for (std::size_t i = 0; i < users.states.size(); ++i)
    if (users.active[i]) total += users.states[i].w_used;
  return static_cast<double>(total) <= w_knee;
}

void oracle_step(OracleUsers& users, double w_knee) {
  policy::Direction dir =
      signal_up(users, w_knee) ? policy::Direction::up : policy::Direction::down;
  for (std::size_t i = 0; i < users.states.size(); ++i) {
    if (!users.active[i]) continue;
    users.states[i] = policy::advance_window(users.params[i], users.kary[i],
                                             dir, users.states[i]);
  }
}

namespace {

// State key with w rounded to 12 decimal digits, absorbing binary
// representation noise from repeated multiplicative updates.
std::vector<std::int64_t> state_key(const OracleUsers& users) {
  std::vector<std::int64_t> key;
  key.reserve(users.states.size() * 2);
  for (std::size_t i = 0; i < users.states.size(); ++i) {
    key.push_back(static_cast<std::int64_t>(
        std::llround(users.states[i].w * 1e12)));
    key.push_back(users.states[i].w_used);
  }
  return key;
}

}  // namespace

Trajectory run_trajectory(const OracleConfig& config) {
  config.validate();
  OracleUsers users;
  users.states.resize(config.n_users);
  users.params.assign(config.n_users, config.policy);
  users.kary.resize(config.n_users);
  users.active.assign(config.n_users, false);
  int inactive = config.n_users;

  auto activate = [&](int i) {
    policy::WindowState& s = users.states[i];
    s.w_max = config.w_max;
    s.w = std::min(config.starts[i].initial_w,
                   static_cast<double>(config.w_max));
    s.w_used = std::clamp(policy::round_half_up(s.w), 1, config.w_max);
    s.last_direction = policy::Direction::none;
    users.kary[i] = {1.0, static_cast<double>(config.w_max)};
    users.active[i] = true;
    inactive -= 1;
  };

  Trajectory traj;
  std::map<std::vector<std::int64_t>, long> seen;
  for (long step = 0; step < config.max_steps; ++step) {
    for (int i = 0; i < config.n_users; ++i)
      if (!users.active[i] && config.starts[i].start_step == step) activate(i);

    StepRecord rec;
    rec.w.resize(config.n_users, 0.0);
    rec.w_used.resize(config.n_users, 0);
    for (int i = 0; i < config.n_users; ++i) {
      if (users.active[i]) {
        rec.w[i] = users.states[i].w;
        rec.w_used[i] = users.states[i].w_used;
      }
    }
    rec.signal_up = signal_up(users, config.w_knee);
    traj.steps.push_back(std::move(rec));

    if (inactive == 0) {
      auto [it, inserted] = seen.emplace(state_key(users), step);
      if (!inserted) {
        CycleInfo cycle;
        cycle.start_index = it->second;
        cycle.period = step - it->second;
        cycle.avg_w_used.assign(config.n_users, 0.0);
        for (long s = cycle.start_index; s < step; ++s)
          for (int i = 0; i < config.n_users; ++i)
            cycle.avg_w_used[i] += traj.steps[s].w_used[i];
        for (double& a : cycle.avg_w_used)
          a /= static_cast<double>(cycle.period);
        // Trim the duplicate state so steps end exactly where the cycle
        // closes.
        traj.steps.pop_back();
        traj.cycle = std::move(cycle);
        return traj;
      }
    }
    oracle_step(users, config.w_knee);
  }

  // No cycle within max_steps: average the final quarter and flag runs
  // whose maximum window only grew there (divergence candidates).
  long n = static_cast<long>(traj.steps.size());
  long tail_start = n - std::max<long>(1, n / 4);
  traj.tail_avg_w_used.assign(config.n_users, 0.0);
  double prev_max = -1.0;
  bool monotone = true;
  for (long s = tail_start; s < n; ++s) {
    double step_max = 0.0;
    for (int i = 0; i < config.n_users; ++i) {
      traj.tail_avg_w_used[i] += traj.steps[s].w_used[i];
      step_max = std::max(step_max, traj.steps[s].w[i]);
    }
    if (step_max < prev_max) monotone = false;
    prev_max = step_max;
  }
  for (double& a : traj.tail_avg_w_used)
    a /= static_cast<double>(n - tail_start);
  double first_max = 0.0, last_max = 0.0;
  for (int i = 0; i < config.n_users; ++i) {
    first_max = std::max(first_max, traj.steps[tail_start].w[i]);
    last_max = std::max(last_max, traj.steps[n - 1].w[i]);
  }
  traj.divergence_flag = monotone && last_max > first_max;
  return traj;
}

ScanReport scan_fairness(const std::vector<double>& knee_grid,
                         const std::vector<std::vector<double>>& start_grid,
                         const policy::PolicyParams& policy, long max_steps) {
  if (knee_grid.empty() || start_grid.empty())
    throw std::domain_error("scan grids must be non-empty");
  ScanReport report;
  report.min_fairness = 2.0;
  for (double knee : knee_grid) {
    for (const std::vector<double>& starts : start_grid) {
      OracleConfig cfg;
      cfg.n_users = static_cast<int>(starts.size());
      cfg.w_knee = knee;
      cfg.policy = policy;
      cfg.max_steps = max_steps;
      for (double s : starts) cfg.starts.push_back({0, s});
      Trajectory traj = run_trajectory(cfg);
      const std::vector<double>& avg = traj.averages();
      double fairness = metrics::fairness_index(avg);
      double lo = avg[0], hi = avg[0];
      for (double a : avg) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      report.max_average_gap = std::max(report.max_average_gap, hi - lo);
      report.instances += 1;
      if (fairness < report.min_fairness) {
        report.min_fairness = fairness;
        report.worst = {knee, starts, avg, fairness};
      }
    }
  }
  return report;
}

}  // namespace kneesim::oracle
