#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cascade/config.hpp"
#include "cascade/errors.hpp"
#include "cascade/harness.hpp"
#include "cascade/records.hpp"

using namespace cascade;
using nlohmann::json;

namespace {

ExperimentConfig make(const std::string& extra = "{}") {
  json d = json::parse(R"({
    "dimension": 1, "prior_radius": 20, "trials": 30, "master_seed": 42,
    "channel": {"kind": "gaussian_shift", "mu": 2.0}
  })");
  d.merge_patch(json::parse(extra));
  return parse_config(d);
}

std::string dump(std::span<const TrialRecord> recs) {
  std::ostringstream out;
  records::write_results(out, recs, {"h", 1});
  return out.str();
}

}  // namespace

TEST_CASE("empty batch") {
  auto cfg = make(R"({"trials": 0})");
  CHECK(harness::run_batch(cfg).empty());
  std::ostringstream out;
  records::write_results(out, {}, records::provenance_of(cfg));
  const auto header = json::parse(out.str());
  CHECK(header["schema"] == records::kTrialsSchema);
  CHECK(header["trials"] == 0);
  CHECK(header["master_seed"] == 42);
}

TEST_CASE("batches are reproducible and independent of worker count") {
  auto cfg = make(R"({"rule": {"kind": "t_r", "rollouts": 20}})");
  const auto a = harness::run_batch(cfg);
  cfg.workers = 3;
  const auto b = harness::run_batch(cfg);
  CHECK(dump(a) == dump(b));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].trial_id == int(i));
  cfg.master_seed = 43;
  CHECK(dump(a) != dump(harness::run_batch(cfg)));
}

TEST_CASE("summaries do not depend on record order") {
  const auto cfg = make();
  auto recs = harness::run_batch(cfg);
  const auto s1 = harness::summarize(recs);
  std::shuffle(recs.begin(), recs.end(), std::mt19937_64(5));
  const auto s2 = harness::summarize(recs);
  CHECK(s1.mean_total_loss == s2.mean_total_loss);
  CHECK(s1.mean_squared_error == s2.mean_squared_error);
  CHECK(s1.mean_stop_time == s2.mean_stop_time);
  CHECK(s1.trials == 30);
}

TEST_CASE("quantile type 7") {
  CHECK(harness::quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(harness::quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(harness::quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(harness::quantile({10, 20}, 0.1) == doctest::Approx(11.0));
  CHECK(harness::quantile({7}, 0.9) == 7.0);
}

TEST_CASE("generous horizon leaves no trial truncated") {
  auto cfg = make(R"({"prior_radius": 50, "trials": 500, "flags": {"accelerated_posterior": true}})");
  CHECK(harness::summarize(harness::run_batch(cfg)).truncated_fraction == 0.0);
}

TEST_CASE("scaling study rows") {
  auto cfg = make(R"({"scaling": {"k_grid": [10]}})");
  const auto rows = harness::scaling_study(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == lattice::ball_size(1, 10));
  CHECK(rows[0].ratio > 0.0);
  CHECK(rows[0].q10_T <= rows[0].q50_T);
  CHECK(rows[0].q50_T <= rows[0].q90_T);
  cfg.k_grid = {10, 10};
  CHECK_THROWS_AS(harness::scaling_study(cfg), ConfigError);
  cfg.k_grid = {};
  CHECK_THROWS_AS(harness::scaling_study(cfg), ConfigError);
}

TEST_CASE("variance profile edge cases") {
  auto flat = make(R"({"dimension": 2, "prior_radius": 4, "t_max": 5,
                       "channel": {"mu": 0.0}, "flags": {"test_mode_channel": true}})");
  const auto p = harness::variance_transition_profile(flat, 10, 1);
  REQUIRE(p.rows.size() == 7);
  CHECK(p.rows[0].time == -1);
  for (const auto& r : p.rows) {
    CHECK(r.mean == p.prior_variance);
    CHECK(r.q50 == p.prior_variance);
  }
  auto point = make(R"({"prior_radius": 0, "t_max": 3})");
  for (const auto& r : harness::variance_transition_profile(point, 5, 1).rows) {
    CHECK(r.mean == 0.0);
    CHECK(r.q90 == 0.0);
  }
}

TEST_CASE("z-check") {
  auto flat = make(R"({"dimension": 2, "prior_radius": 6, "t_max": 4,
                       "channel": {"mu": 0.0}, "flags": {"test_mode_channel": true}})");
  const auto rep = harness::normalizer_concentration_check(flat, 0.5, 20, 3);
  CHECK(rep.n == lattice::ball_size(2, 6));
  CHECK(rep.rows.size() == 5);
  for (const auto& r : rep.rows) {
    CHECK(r.exceedance == 0.0);
    CHECK(r.within_bound);
  }
  CHECK_THROWS_AS(harness::normalizer_concentration_check(flat, 0.01, 20, 3), InputError);
}

TEST_CASE("result writers") {
  const auto cfg = make(R"({"trials": 3, "rule": {"kind": "t_r", "rollouts": 5}})");
  const auto recs = harness::run_batch(cfg);
  std::istringstream in(dump(recs));
  std::string line;
  std::getline(in, line);
  CHECK(json::parse(line)["config_hash"] == "h");
  int n = 0;
  while (std::getline(in, line)) {
    const auto row = json::parse(line);
    CHECK(row["trial"] == n);
    CHECK(row["stop_time"] == recs[n].stop_time);
    CHECK(row["total_loss"].get<double>() == recs[n].total_loss);
    CHECK(row["lookahead"].size() == recs[n].lookahead.size());
    ++n;
  }
  CHECK(n == 3);

  std::ostringstream csv;
  records::write_summary(csv, harness::summarize(recs), records::provenance_of(cfg));
  CHECK(csv.str().find("# config_hash=" + config_hash(cfg)) != std::string::npos);
  CHECK(csv.str().find("trials,mean_stop_time") != std::string::npos);

  CHECK(records::format_double(0.1) == "0.1");
  CHECK(std::stod(records::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("snapshot and frame dumps") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cascade_dump_test";
  fs::remove_all(dir);
  auto cfg = make(R"({"prior_radius": 3, "trials": 2, "t_max": 4,
                      "flags": {"snapshot_export": true, "frame_dump": true}})");
  cfg.output.dir = dir.string();
  const auto recs = harness::run_batch(cfg);
  CHECK(fs::exists(dir / "snapshots" / "trial_0.csv"));
  CHECK(fs::exists(dir / "frames" / "trial_1.csv"));
  std::ifstream snap(dir / "snapshots" / "trial_0.csv");
  int rows = 0;
  for (std::string l; std::getline(snap, l);) ++rows;
  CHECK(rows == 7 * (recs[0].stop_time + 1));
}
