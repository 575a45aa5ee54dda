#include "cascade/records.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cascade::records {

namespace fs = std::filesystem;
using nlohmann::json;

Provenance provenance_of(const ExperimentConfig& cfg) {
  return {config_hash(cfg), cfg.master_seed};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return json(x).dump();
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json lookahead_to_json(const LookaheadRecord& rec) {
  return {{"step", rec.step},
          {"value", finite_or_null(rec.estimate.value)},
          {"std_error", finite_or_null(rec.estimate.std_error)},
          {"rollouts", rec.estimate.rollouts_used}};
}

void csv_header(std::ostream& out, const char* schema, const Provenance& p) {
  out << "# schema=" << schema << "\n";
  out << "# config_hash=" << p.config_hash << "\n";
  out << "# master_seed=" << p.master_seed << "\n";
}

template <class... Ts>
void csv_row(std::ostream& out, const Ts&... fields) {
  bool first = true;
  auto emit = [&](const auto& f) {
    if (!first) out << ',';
    first = false;
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, double>) {
      out << format_double(f);
    } else if constexpr (std::is_same_v<F, bool>) {
      out << (f ? "true" : "false");
    } else {
      out << f;
    }
  };
  (emit(fields), ...);
  out << '\n';
}

json vertex_json(const lattice::Vertex& v) {
  json arr = json::array();
  for (int i = 0; i < v.dimension(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

json trial_to_json(const TrialRecord& rec) {
  json doc;
  doc["trial"] = rec.trial_id;
  doc["source"] = vertex_json(rec.source);
  doc["stop_time"] = rec.stop_time;
  doc["truncated"] = rec.truncated;
  doc["estimate"] = rec.estimate;
  doc["squared_error"] = rec.squared_error;
  doc["infection_cost"] = rec.infection_cost;
  doc["total_loss"] = rec.total_loss;
  doc["variance"] = rec.variance_trajectory;
  doc["log_normalizer"] = rec.log_normalizer_trajectory;
  json look = json::array();
  for (const auto& l : rec.lookahead) look.push_back(lookahead_to_json(l));
  doc["lookahead"] = std::move(look);
  return doc;
}

void write_results(std::ostream& out, std::span<const TrialRecord> records, const Provenance& p) {
  json header = {{"schema", kTrialsSchema},
                 {"config_hash", p.config_hash},
                 {"master_seed", p.master_seed},
                 {"trials", records.size()}};
  out << header.dump() << '\n';
  for (const auto& rec : records) out << trial_to_json(rec).dump() << '\n';
}

void write_summary(std::ostream& out, const harness::BatchSummary& s, const Provenance& p) {
  csv_header(out, kSummarySchema, p);
  out << "trials,mean_stop_time,mean_squared_error,mean_infection_cost,mean_total_loss,"
         "truncated_fraction\n";
  csv_row(out, s.trials, s.mean_stop_time, s.mean_squared_error, s.mean_infection_cost,
          s.mean_total_loss, s.truncated_fraction);
}

void write_scaling(std::ostream& out, std::span<const harness::ScalingRow> rows,
                   const Provenance& p) {
  csv_header(out, kScalingSchema, p);
  out << "n,k,trials,mean_T,q10_T,q50_T,q90_T,mean_loss,truncated_fraction,predicted_scale,"
         "ratio\n";
  for (const auto& r : rows) {
    csv_row(out, r.n, r.k, r.trials, r.mean_T, r.q10_T, r.q50_T, r.q90_T, r.mean_loss,
            r.truncated_fraction, r.predicted_scale, r.ratio);
  }
}

void write_profile(std::ostream& out, const harness::VarianceProfile& profile,
                   const Provenance& p) {
  csv_header(out, kProfileSchema, p);
  out << "time,mean_variance,q10,q50,q90\n";
  for (const auto& r : profile.rows) csv_row(out, r.time, r.mean, r.q10, r.q50, r.q90);
}

void write_z_check(std::ostream& out, const harness::ZCheckReport& report, const Provenance& p) {
  csv_header(out, kZCheckSchema, p);
  out << "# n=" << report.n << " eps=" << format_double(report.eps)
      << " lemma_horizon=" << report.lemma_horizon << "\n";
  out << "time,exceedance,bound,binomial_se,within_bound,lemma_range\n";
  for (const auto& r : report.rows) {
    csv_row(out, r.time, r.exceedance, report.bound, r.binomial_se, r.within_bound,
            r.lemma_range);
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

// snapshots/trial_<id>.csv: time,index,coords...,log_weight
// frames/trial_<id>.csv:    time,index,coords...,value
class FileObserver final : public TrajectoryObserver {
 public:
  FileObserver(const fs::path& dir, int trial_id, bool snapshots, bool frames) {
    const std::string name = "trial_" + std::to_string(trial_id) + ".csv";
    if (snapshots) open(snapshots_, dir / "snapshots", name);
    if (frames) open(frames_, dir / "frames", name);
  }

  void on_frame(const ObservationFrame& frame) override {
    if (!frames_.is_open()) return;
    const auto& verts = frame.window->vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      row(frames_, frame.time, i, verts[i], frame.values[i]);
    }
  }

  void on_posterior(const PosteriorState& state) override {
    if (!snapshots_.is_open()) return;
    const auto& cands = state.candidates();
    const auto lw = state.log_weights();
    for (std::size_t i = 0; i < cands.size(); ++i) row(snapshots_, state.time(), i, cands[i], lw[i]);
  }

 private:
  static void open(std::ofstream& out, const fs::path& sub, const std::string& name) {
    fs::create_directories(sub);
    out.open(sub / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + (sub / name).string());
  }

  static void row(std::ofstream& out, int time, std::size_t index, const lattice::Vertex& v,
                  double value) {
    out << time << ',' << index;
    for (int j = 0; j < v.dimension(); ++j) out << ',' << v[j];
    out << ',' << format_double(value) << '\n';
  }

  std::ofstream snapshots_;
  std::ofstream frames_;
};

}  // namespace

std::unique_ptr<TrajectoryObserver> make_file_observer(const fs::path& dir, int trial_id,
                                                        bool snapshots, bool frames) {
  return std::make_unique<FileObserver>(dir, trial_id, snapshots, frames);
}

}  // namespace cascade::records
