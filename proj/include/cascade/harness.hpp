#pragma once

// Batch driver and the verification studies built on it. Every batch is
// a pure function of (config, master seed): trial i always draws from
// RandomStream(seed).child(i), whatever the worker count.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cascade/config.hpp"
#include "cascade/trial.hpp"

namespace cascade::harness {

using ObserverFactory = std::function<std::unique_ptr<TrajectoryObserver>(int trial_id)>;

std::vector<TrialRecord> run_batch(const TrialSetup& setup, const stopping::StoppingRule& rule,
                                   int trials, std::uint64_t master_seed, unsigned workers = 1,
                                   const ObserverFactory& observers = {});

// Uses cfg.trials, cfg.master_seed and cfg.workers; wires snapshot / frame
// dump observers into cfg.output.dir when the flags ask for them.
std::vector<TrialRecord> run_batch(const ExperimentConfig& cfg);

struct BatchSummary {
  int trials = 0;
  double mean_stop_time = 0.0;
  double mean_squared_error = 0.0;
  double mean_infection_cost = 0.0;
  double mean_total_loss = 0.0;
  double truncated_fraction = 0.0;
};

// Order-independent: values are sorted before they are summed.
BatchSummary summarize(std::span<const TrialRecord> records);
double order_free_mean(std::vector<double> values);
// Linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double q);

struct ScalingRow {
  lattice::Count n = 0;
  int k = 0;
  int trials = 0;
  double mean_T = 0.0;
  double q10_T = 0.0, q50_T = 0.0, q90_T = 0.0;
  double mean_loss = 0.0;
  double truncated_fraction = 0.0;
  double predicted_scale = 0.0;  // (log n)^(1/(d+1))
  double ratio = 0.0;            // mean_T / predicted_scale
};

// One row per prior radius in cfg.k_grid (strictly increasing). t_max and
// a derived T_r horizon are recomputed per radius unless pinned in cfg.
// Row k draws from master seed RandomStream(cfg.master_seed).child(k).key().
std::vector<ScalingRow> scaling_study(const ExperimentConfig& cfg);

struct ProfileRow {
  int time = 0;  // -1 is the prior
  double mean = 0.0;
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

struct VarianceProfile {
  double prior_variance = 0.0;
  std::vector<ProfileRow> rows;  // rows[0] is the prior, then t = 0..t_max
};

// Runs every trial to t_max without stopping.
VarianceProfile variance_transition_profile(const ExperimentConfig& cfg, int trials,
                                            std::uint64_t master_seed);

struct ZCheckRow {
  int time = 0;
  double exceedance = 0.0;   // fraction of trials with |Z(t) - n| > eps n
  double binomial_se = 0.0;  // sqrt(b (1 - b) / trials) at b = min(bound, 1)
  bool within_bound = false; // exceedance <= bound + 3 SE
  bool lemma_range = false;  // t <= growth_inverse(d, 0.1 log n)
};

struct ZCheckReport {
  lattice::Count n = 0;
  double eps = 0.0;
  double bound = 0.0;  // 4 / (sqrt(n) eps^2)
  int lemma_horizon = 0;
  std::vector<ZCheckRow> rows;
};

// Requires eps >= 1/sqrt(n). Horizon is cfg.z_horizon, else t_max.
ZCheckReport normalizer_concentration_check(const ExperimentConfig& cfg, double eps, int trials,
                                            std::uint64_t master_seed);

}  // namespace cascade::harness
