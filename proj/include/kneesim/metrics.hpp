#pragma once

#include <vector>

#include "kneesim/engine.hpp"
#include "kneesim/sim_types.hpp"

namespace kneesim::metrics {

struct PowerParams {
  double alpha = 1.0;  // weights throughput against response time
};

// throughput^alpha / response_time. Throws std::domain_error on
// non-positive inputs.
double power(double throughput, double response_time, PowerParams params = {});

// (sum x)^2 / (n * sum x^2) over per-user throughputs; 1 for equal shares,
// k/n when k of n users share equally and the rest get nothing. Throws
// std::domain_error for an empty or all-zero vector.
double fairness_index(const std::vector<double>& xs);

struct BitBalance {
  double fraction_set = 0.0;
  double entropy_bits = 0.0;  // 1.0 when the bit is set half the time
};

BitBalance bit_balance(const std::vector<bool>& bits);

struct SweepPoint {
  int window = 0;
  double throughput = 0.0;
  double response_time = 0.0;
  double power = 0.0;
};

struct KneeEstimate {
  double w_knee_total = 0.0;
  double power_at_knee = 0.0;
  double throughput_at_knee = 0.0;
  std::vector<SweepPoint> sweep;
};

// Locates the knee of the configured path: for each fixed total window in
// [w_lo, w_hi] a single probe user runs with adaptation disabled, steady
// throughput and response time are measured over the final 80% of delivered
// packets (post warmup), and the window maximizing power wins. Ties within
// 1e-9 relative go to the smallest window (lower delay at equal power).
KneeEstimate find_knee(const sim::SimConfig& config, PowerParams params,
                       int w_lo, int w_hi);

// Equal split of the knee throughput: the efficient-and-fair per-user
// target for n simultaneously active users on the shared path.
std::vector<double> goals(const sim::SimConfig& config,
                          const KneeEstimate& knee);

// The four-level statistic: values indexed by (time bucket, user,
// replication, parameter set), with means and variances at each aggregation
// level. Every level's mean equals the mean of the level below it
// (equal-weight buckets); variances are population variances.
class MetricCube {
 public:
  MetricCube(int n_params, int n_reps, int n_users, int n_buckets);

  void set(int p, int i, int u, int t, double v);
  double value(int p, int i, int u, int t) const;

  int params() const { return n_params_; }
  int reps() const { return n_reps_; }
  int users() const { return n_users_; }
  int buckets() const { return n_buckets_; }

  double mean_over_time(int p, int i, int u) const;   // T(u,i,p)
  double var_over_time(int p, int i, int u) const;
  double mean_over_users(int p, int i) const;         // T(i,p)
  double var_over_users(int p, int i) const;
  double mean_over_reps(int p) const;                 // T(p)
  double var_over_reps(int p) const;

 private:
  int n_params_, n_reps_, n_users_, n_buckets_;
  std::vector<double> values_;
};

// Fills one (p, i) slice with per-user bucket throughputs (deliveries per
// second in each of `buckets` equal spans of the run).
void fill_cube_from_run(MetricCube& cube, int p, int i,
                        const sim::RunRecord& record, int n_users);

struct AggregateReport {
  std::vector<double> scaled;  // per user: actual / goal, last replication set
  double efficiency = 0.0;           // mean over users of scaled
  double fairness_variance = 0.0;    // population variance over users
  std::vector<double> per_rep_efficiency;
  std::vector<double> per_rep_fairness_variance;
};

// Scales each user's cube throughput by its goal and aggregates: the mean
// of the scaled values measures efficiency (1 = at goal), their variance
// across users measures unfairness (0 = totally fair). Reported per
// replication for parameter set p, plus the p-level summary.
AggregateReport scale_and_aggregate(const MetricCube& cube, int p,
                                    const std::vector<double>& goals);

}  // namespace kneesim::metrics
