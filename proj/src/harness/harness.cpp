#include "cascade/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"
#include "cascade/records.hpp"

namespace cascade::harness {

std::vector<TrialRecord> run_batch(const TrialSetup& setup, const stopping::StoppingRule& rule,
                                   int trials, std::uint64_t master_seed, unsigned workers,
                                   const ObserverFactory& observers) {
  if (trials < 0) throw InputError("trials must be >= 0");
  std::vector<TrialRecord> out(static_cast<std::size_t>(trials));
  const RandomStream master(master_seed);
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const int id = static_cast<int>(i);
    std::unique_ptr<TrajectoryObserver> observer = observers ? observers(id) : nullptr;
    out[i] = run_trajectory(setup, rule, master.child(i), id, observer.get());
  });
  return out;
}

std::vector<TrialRecord> run_batch(const ExperimentConfig& cfg) {
  ObserverFactory observers;
  if (cfg.snapshot_export || cfg.frame_dump) {
    const std::filesystem::path dir = cfg.output.dir;
    observers = [dir, &cfg](int id) {
      return records::make_file_observer(dir, id, cfg.snapshot_export, cfg.frame_dump);
    };
  }
  return run_batch(make_setup(cfg), resolve_rule(cfg), cfg.trials, cfg.master_seed,
                   resolve_workers(cfg.workers), observers);
}

double order_free_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  // Offsets from the minimum keep the mean of identical values exact.
  const double base = values.front();
  double total = 0.0;
  for (double v : values) total += v - base;
  return base + total / static_cast<double>(values.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

template <class F>
std::vector<double> column(std::span<const TrialRecord> records, F&& field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(static_cast<double>(field(r)));
  return out;
}

}  // namespace

BatchSummary summarize(std::span<const TrialRecord> records) {
  BatchSummary s;
  s.trials = static_cast<int>(records.size());
  if (records.empty()) return s;
  s.mean_stop_time = order_free_mean(column(records, [](const auto& r) { return r.stop_time; }));
  s.mean_squared_error =
      order_free_mean(column(records, [](const auto& r) { return r.squared_error; }));
  s.mean_infection_cost =
      order_free_mean(column(records, [](const auto& r) { return r.infection_cost; }));
  s.mean_total_loss = order_free_mean(column(records, [](const auto& r) { return r.total_loss; }));
  const auto truncated = std::count_if(records.begin(), records.end(),
                                       [](const auto& r) { return r.truncated; });
  s.truncated_fraction = static_cast<double>(truncated) / static_cast<double>(records.size());
  return s;
}

std::vector<ScalingRow> scaling_study(const ExperimentConfig& cfg) {
  if (cfg.k_grid.empty()) throw ConfigError("scaling.k_grid", "required for a scaling study");
  for (std::size_t i = 1; i < cfg.k_grid.size(); ++i) {
    if (cfg.k_grid[i] <= cfg.k_grid[i - 1]) {
      throw ConfigError("scaling.k_grid", "must be strictly increasing");
    }
  }
  std::vector<ScalingRow> rows;
  const RandomStream master(cfg.master_seed);
  for (int k : cfg.k_grid) {
    ExperimentConfig point = cfg;
    point.prior_radius = k;
    const TrialSetup setup = make_setup(point);
    const auto records = run_batch(setup, resolve_rule(point), cfg.trials,
                                   master.child(static_cast<std::uint64_t>(k)).key(),
                                   resolve_workers(cfg.workers));
    const auto stops = column(records, [](const auto& r) { return r.stop_time; });
    const auto summary = summarize(records);

    ScalingRow row;
    row.k = k;
    row.n = setup.support.size;
    row.trials = cfg.trials;
    row.mean_T = summary.mean_stop_time;
    row.q10_T = quantile(stops, 0.1);
    row.q50_T = quantile(stops, 0.5);
    row.q90_T = quantile(stops, 0.9);
    row.mean_loss = summary.mean_total_loss;
    row.truncated_fraction = summary.truncated_fraction;
    row.predicted_scale =
        std::pow(std::log(static_cast<double>(row.n)), 1.0 / (cfg.dimension + 1.0));
    row.ratio = row.predicted_scale > 0.0 ? row.mean_T / row.predicted_scale : 0.0;
    rows.push_back(row);
  }
  return rows;
}

VarianceProfile variance_transition_profile(const ExperimentConfig& cfg, int trials,
                                            std::uint64_t master_seed) {
  const TrialSetup setup = make_setup(cfg);
  const auto records = run_batch(setup, stopping::StoppingRule::fixed_horizon(setup.t_max), trials,
                                 master_seed, resolve_workers(cfg.workers));
  VarianceProfile profile;
  profile.prior_variance = setup.prior.variance();
  const double pv = profile.prior_variance;
  profile.rows.push_back({-1, pv, pv, pv, pv});
  for (int t = 0; t <= setup.t_max; ++t) {
    const auto values = column(records, [t](const auto& r) { return r.variance_trajectory[t]; });
    profile.rows.push_back({t, order_free_mean(values), quantile(values, 0.1),
                            quantile(values, 0.5), quantile(values, 0.9)});
  }
  return profile;
}

ZCheckReport normalizer_concentration_check(const ExperimentConfig& cfg, double eps, int trials,
                                            std::uint64_t master_seed) {
  ZCheckReport report;
  report.n = prior_size(cfg);
  const double n = static_cast<double>(report.n);
  if (!(eps >= 1.0 / std::sqrt(n))) {
    throw InputError("z-check requires eps >= 1/sqrt(n) = " + std::to_string(1.0 / std::sqrt(n)));
  }
  if (trials < 1) throw InputError("z-check needs at least one trial");
  report.eps = eps;
  report.bound = 4.0 / (std::sqrt(n) * eps * eps);
  report.lemma_horizon = lattice::growth_inverse(cfg.dimension, 0.1 * std::log(n));

  const TrialSetup setup = make_setup(cfg);
  const int horizon = cfg.z_horizon.value_or(setup.t_max);
  const auto records = run_batch(setup, stopping::StoppingRule::fixed_horizon(horizon), trials,
                                 master_seed, resolve_workers(cfg.workers));
  const double log_n = std::log(n);
  const double b = std::min(report.bound, 1.0);
  const double se = std::sqrt(b * (1.0 - b) / trials);
  for (int t = 0; t <= horizon; ++t) {
    int exceed = 0;
    for (const auto& r : records) {
      // |Z/n - 1| > eps, evaluated without leaving log space for large Z
      const double log_ratio = r.log_normalizer_trajectory[t] - log_n;
      const bool over = log_ratio > std::log1p(eps) ||
                        (eps < 1.0 && log_ratio < std::log1p(-eps));
      exceed += over ? 1 : 0;
    }
    ZCheckRow row;
    row.time = t;
    row.exceedance = static_cast<double>(exceed) / trials;
    row.binomial_se = se;
    row.within_bound = row.exceedance <= report.bound + 3.0 * se;
    row.lemma_range = t <= report.lemma_horizon;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace cascade::harness
