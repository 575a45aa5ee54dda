#pragma once

// Experiment configuration: a JSON document (comments allowed). Every
// field is validated before any computation; failures raise ConfigError
// naming the field path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/channels.hpp"
#include "cascade/stopping.hpp"
#include "cascade/trial.hpp"

namespace cascade {

struct RuleConfig {
  stopping::RuleKind kind = stopping::RuleKind::kTPlus;
  std::optional<int> r;  // T_r horizon; derived from r_coeff when absent
  double r_coeff = 6.0;
  int rollouts = 200;
  double guard_z = 0.0;
  stopping::LookaheadEstimator estimator = stopping::LookaheadEstimator::kVarianceDifference;
  int horizon = 0;  // fixed_horizon
};

struct OutputConfig {
  std::string dir = "results";
  std::string results = "results.jsonl";
  std::string summary = "summary.csv";
  std::string scaling = "scaling.csv";
  std::string profile = "variance_profile.csv";
  std::string z_check = "z_check.csv";
};

struct ExperimentConfig {
  int dimension = 1;
  int prior_radius = 10;
  std::optional<int> t_max;  // default 4 * growth_inverse(d, 10 log n)
  int trials = 100;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;  // 0 = all hardware threads
  channels::ChannelPair channel = channels::ChannelPair::gaussian_shift(1.0);
  RuleConfig rule;
  OutputConfig output;

  bool snapshot_export = false;
  bool frame_dump = false;
  bool accelerated_posterior = false;
  bool test_mode_channel = false;

  std::vector<int> k_grid;              // scaling
  double z_eps = 0.5;                   // z-check
  std::optional<int> z_horizon;         // z-check, default t_max
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

// Effective configuration with every default filled in. Parsing the result
// yields a config that reproduces the same outputs.
nlohmann::json to_json(const ExperimentConfig& cfg);

// FNV-1a over the compact dump of to_json(cfg), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

lattice::Count prior_size(const ExperimentConfig& cfg);
int effective_t_max(const ExperimentConfig& cfg);
int default_t_max(int dimension, lattice::Count n);
stopping::StoppingRule resolve_rule(const ExperimentConfig& cfg);
TrialSetup make_setup(const ExperimentConfig& cfg);

// Worker count after applying 0 = hardware concurrency and the
// CASCADE_MAX_WORKERS cap.
unsigned resolve_workers(unsigned requested);

}  // namespace cascade
