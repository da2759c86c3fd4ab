#include "kneesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kneesim::metrics {

double power(double throughput, double response_time, PowerParams params) {
  if (!(throughput > 0.0)) throw std::domain_error("throughput must be > 0");
  if (!(response_time > 0.0))
    throw std::domain_error("response time must be > 0");
  if (!(params.alpha > 0.0)) throw std::domain_error("alpha must be > 0");
  return std::pow(throughput, params.alpha) / response_time;
}

double fairness_index(const std::vector<double>& xs) {
  if (xs.empty()) throw std::domain_error("fairness needs at least one user");
  double sum = 0.0, sumsq = 0.0;
  for (double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::domain_error("throughputs must be finite and >= 0");
    sum += x;
    sumsq += x * x;
  }
  if (sumsq <= 0.0)
    throw std::domain_error("fairness undefined for an all-zero vector");
  return sum * sum / (static_cast<double>(xs.size()) * sumsq);
}

BitBalance bit_balance(const std::vector<bool>& bits) {
  if (bits.empty()) throw std::domain_error("bit_balance needs samples");
  double set = 0.0;
  for (bool b : bits) set += b ? 1.0 : 0.0;
  double p = set / static_cast<double>(bits.size());
  auto plog = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  return {p, -plog(p) - plog(1.0 - p)};
}

KneeEstimate find_knee(const sim::SimConfig& config, PowerParams params,
                       int w_lo, int w_hi) {
  if (w_lo < 1 || w_hi < w_lo) throw std::domain_error("empty window range");
  KneeEstimate est;
  for (int w = w_lo; w <= w_hi; ++w) {
    sim::SimConfig probe = config;
    probe.transient.enabled = false;
    probe.users.clear();
    sim::UserSpec u;
    u.user_id = 0;
    u.total_packets = std::max<long>(400, 60L * w);
    u.w_max = w;
    u.initial_window = w;
    probe.users.push_back(u);
    probe.policy.fixed_window = w;
    sim::RunRecord rec = sim::run_simulation(probe);

    double warmup_end = probe.policy.warmup_rtts * probe.base_round_trip();
    long n = static_cast<long>(rec.packets.size());
    long skip = n / 5;  // steady state: final 80% of deliveries
    double t_lo = warmup_end, t_first = -1.0, t_last = 0.0;
    long count = 0;
    double rtt_sum = 0.0;
    for (long i = 0; i < n; ++i) {
      const sim::PacketRecord& p = rec.packets[i];
      if (i < skip || p.delivery_time < t_lo) continue;
      if (t_first < 0.0) t_first = p.send_time;
      t_last = p.delivery_time;
      rtt_sum += p.delivery_time - p.send_time;
      count += 1;
    }
    SweepPoint pt;
    pt.window = w;
    if (count > 0 && t_last > t_first) {
      pt.throughput = static_cast<double>(count) / (t_last - t_first);
      pt.response_time = rtt_sum / static_cast<double>(count);
      pt.power = power(pt.throughput, pt.response_time, params);
    }
    est.sweep.push_back(pt);
  }
  // Smallest window within relative tolerance of the maximal power.
  double best = 0.0;
  for (const SweepPoint& pt : est.sweep) best = std::max(best, pt.power);
  for (const SweepPoint& pt : est.sweep) {
    if (pt.power >= best * (1.0 - 1e-9)) {
      est.w_knee_total = pt.window;
      est.power_at_knee = pt.power;
      est.throughput_at_knee = pt.throughput;
      break;
    }
  }
  return est;
}

std::vector<double> goals(const sim::SimConfig& config,
                          const KneeEstimate& knee) {
  std::size_t n = config.users.size();
  return std::vector<double>(
      n, knee.throughput_at_knee / static_cast<double>(n));
}

MetricCube::MetricCube(int n_params, int n_reps, int n_users, int n_buckets)
    : n_params_(n_params),
      n_reps_(n_reps),
      n_users_(n_users),
      n_buckets_(n_buckets),
      values_(static_cast<std::size_t>(n_params) * n_reps * n_users * n_buckets,
              0.0) {
  if (n_params < 1 || n_reps < 1 || n_users < 1 || n_buckets < 1)
    throw std::domain_error("cube dimensions must be >= 1");
}

void MetricCube::set(int p, int i, int u, int t, double v) {
  values_[((static_cast<std::size_t>(p) * n_reps_ + i) * n_users_ + u) *
              n_buckets_ +
          t] = v;
}

double MetricCube::value(int p, int i, int u, int t) const {
  return values_[((static_cast<std::size_t>(p) * n_reps_ + i) * n_users_ + u) *
                     n_buckets_ +
                 t];
}

namespace {

template <typename F>
double mean_of(int n, F item) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += item(k);
  return s / static_cast<double>(n);
}

template <typename F>
double var_of(int n, F item) {
  double m = mean_of(n, item);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    double d = item(k) - m;
    s += d * d;
  }
  return s / static_cast<double>(n);
}

}  // namespace

double MetricCube::mean_over_time(int p, int i, int u) const {
  return mean_of(n_buckets_, [&](int t) { return value(p, i, u, t); });
}
double MetricCube::var_over_time(int p, int i, int u) const {
  return var_of(n_buckets_, [&](int t) { return value(p, i, u, t); });
}
double MetricCube::mean_over_users(int p, int i) const {
  return mean_of(n_users_, [&](int u) { return mean_over_time(p, i, u); });
}
double MetricCube::var_over_users(int p, int i) const {
  return var_of(n_users_, [&](int u) { return mean_over_time(p, i, u); });
}
double MetricCube::mean_over_reps(int p) const {
  return mean_of(n_reps_, [&](int i) { return mean_over_users(p, i); });
}
double MetricCube::var_over_reps(int p) const {
  return var_of(n_reps_, [&](int i) { return mean_over_users(p, i); });
}

void fill_cube_from_run(MetricCube& cube, int p, int i,
                        const sim::RunRecord& record, int n_users) {
  double span = record.end_time;
  if (span <= 0.0) return;
  double width = span / cube.buckets();
  std::vector<std::vector<long>> counts(
      n_users, std::vector<long>(cube.buckets(), 0));
  for (const sim::PacketRecord& pr : record.packets) {
    int b = std::min(static_cast<int>(pr.delivery_time / width),
                     cube.buckets() - 1);
    counts[pr.user_id][b] += 1;
  }
  for (int u = 0; u < n_users; ++u)
    for (int t = 0; t < cube.buckets(); ++t)
      cube.set(p, i, u, t, static_cast<double>(counts[u][t]) / width);
}

AggregateReport scale_and_aggregate(const MetricCube& cube, int p,
                                    const std::vector<double>& goals) {
  if (static_cast<int>(goals.size()) != cube.users())
    throw std::domain_error("one goal per user is required");
  for (double g : goals)
    if (!(g > 0.0)) throw std::domain_error("goals must be > 0");
  AggregateReport rep;
  for (int i = 0; i < cube.reps(); ++i) {
    rep.scaled.assign(cube.users(), 0.0);
    for (int u = 0; u < cube.users(); ++u)
      rep.scaled[u] = cube.mean_over_time(p, i, u) / goals[u];
    double eff = mean_of(cube.users(), [&](int u) { return rep.scaled[u]; });
    double fv = var_of(cube.users(), [&](int u) { return rep.scaled[u]; });
    rep.per_rep_efficiency.push_back(eff);
    rep.per_rep_fairness_variance.push_back(fv);
  }
  rep.efficiency =
      mean_of(cube.reps(), [&](int i) { return rep.per_rep_efficiency[i]; });
  rep.fairness_variance = mean_of(cube.reps(), [&](int i) {
    return rep.per_rep_fairness_variance[i];
  });
  return rep;
}

}  // namespace kneesim::metrics
