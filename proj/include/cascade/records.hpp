#pragma once

// Result files. Every file starts with provenance (schema version, config
// hash, master seed): a header object on the first JSON-lines row, or '#'
// comment lines at the top of a CSV.
//
//   results   JSON lines, schema cascade.trials/1
//   summary   CSV: trials,mean_stop_time,mean_squared_error,mean_infection_cost,
//                  mean_total_loss,truncated_fraction
//   scaling   CSV: n,k,trials,mean_T,q10_T,q50_T,q90_T,mean_loss,truncated_fraction,
//                  predicted_scale,ratio
//   profile   CSV: time,mean_variance,q10,q50,q90 (time -1 is the prior)
//   z-check   CSV: time,exceedance,bound,binomial_se,within_bound,lemma_range

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "cascade/harness.hpp"

namespace cascade::records {

inline constexpr const char* kTrialsSchema = "cascade.trials/1";
inline constexpr const char* kSummarySchema = "cascade.summary/1";
inline constexpr const char* kScalingSchema = "cascade.scaling/1";
inline constexpr const char* kProfileSchema = "cascade.variance_profile/1";
inline constexpr const char* kZCheckSchema = "cascade.z_check/1";

struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

Provenance provenance_of(const ExperimentConfig& cfg);

// Shortest round-trip decimal form, fixed across runs.
std::string format_double(double x);

nlohmann::json trial_to_json(const TrialRecord& rec);

void write_results(std::ostream& out, std::span<const TrialRecord> records, const Provenance& p);
void write_summary(std::ostream& out, const harness::BatchSummary& s, const Provenance& p);
void write_scaling(std::ostream& out, std::span<const harness::ScalingRow> rows, const Provenance& p);
void write_profile(std::ostream& out, const harness::VarianceProfile& profile, const Provenance& p);
void write_z_check(std::ostream& out, const harness::ZCheckReport& report, const Provenance& p);

// Opens path for writing (creating parent directories) and calls fn(stream);
// throws std::runtime_error naming the path on failure.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn);

// Per-trial CSV writers behind flags.snapshot_export / flags.frame_dump.
std::unique_ptr<TrajectoryObserver> make_file_observer(const std::filesystem::path& dir,
                                                        int trial_id, bool snapshots, bool frames);

}  // namespace cascade::records
