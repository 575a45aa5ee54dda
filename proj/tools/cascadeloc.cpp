// cascadeloc: command-line front end for the source-localization simulator.
//
// Exit status: 0 success, 1 a requested check failed, 2 bad arguments or
// config, 3 I/O or runtime failure. Diagnostics go to stderr.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cascade/config.hpp"
#include "cascade/errors.hpp"
#include "cascade/harness.hpp"
#include "cascade/kernels.hpp"
#include "cascade/lattice.hpp"
#include "cascade/records.hpp"

namespace fs = std::filesystem;
using namespace cascade;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kRuntime = 3 };

struct RunOptions {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
};

ExperimentConfig load(const RunOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.out_dir) cfg.output.dir = *opts.out_dir;
  if (opts.workers) cfg.workers = *opts.workers;
  return cfg;
}

fs::path out_path(const ExperimentConfig& cfg, const std::string& name) {
  return fs::path(cfg.output.dir) / name;
}

void echo_config(const ExperimentConfig& cfg) {
  records::write_file(out_path(cfg, "effective_config.json"),
                      [&](std::ostream& out) { out << to_json(cfg).dump(2) << '\n'; });
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int cmd_simulate(const RunOptions& opts) {
  const ExperimentConfig cfg = load(opts);
  const auto prov = records::provenance_of(cfg);
  echo_config(cfg);
  const auto trials = harness::run_batch(cfg);
  const auto summary = harness::summarize(trials);
  records::write_file(out_path(cfg, cfg.output.results),
                      [&](std::ostream& out) { records::write_results(out, trials, prov); });
  records::write_file(out_path(cfg, cfg.output.summary),
                      [&](std::ostream& out) { records::write_summary(out, summary, prov); });
  std::cout << "trials=" << summary.trials << " mean_T=" << fmt(summary.mean_stop_time)
            << " mean_loss=" << fmt(summary.mean_total_loss)
            << " truncated=" << fmt(summary.truncated_fraction) << " hash=" << prov.config_hash
            << '\n';
  return kOk;
}

int cmd_scaling(const RunOptions& opts) {
  const ExperimentConfig cfg = load(opts);
  const auto prov = records::provenance_of(cfg);
  echo_config(cfg);
  const auto rows = harness::scaling_study(cfg);
  records::write_file(out_path(cfg, cfg.output.scaling),
                      [&](std::ostream& out) { records::write_scaling(out, rows, prov); });
  double lo = rows.front().ratio, hi = rows.front().ratio;
  for (const auto& r : rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  std::cout << "rows=" << rows.size() << " ratio_min=" << fmt(lo) << " ratio_max=" << fmt(hi)
            << " band=" << fmt(lo > 0 ? hi / lo : INFINITY) << " hash=" << prov.config_hash << '\n';
  return kOk;
}

int cmd_profile(const RunOptions& opts) {
  const ExperimentConfig cfg = load(opts);
  const auto prov = records::provenance_of(cfg);
  echo_config(cfg);
  const auto profile = harness::variance_transition_profile(cfg, cfg.trials, cfg.master_seed);
  records::write_file(out_path(cfg, cfg.output.profile),
                      [&](std::ostream& out) { records::write_profile(out, profile, prov); });
  const auto& last = profile.rows.back();
  std::cout << "prior_variance=" << fmt(profile.prior_variance) << " t_final=" << last.time
            << " median_final=" << fmt(last.q50) << " hash=" << prov.config_hash << '\n';
  return kOk;
}

int cmd_z_check(const RunOptions& opts) {
  const ExperimentConfig cfg = load(opts);
  const auto prov = records::provenance_of(cfg);
  echo_config(cfg);
  const auto report =
      harness::normalizer_concentration_check(cfg, cfg.z_eps, cfg.trials, cfg.master_seed);
  records::write_file(out_path(cfg, cfg.output.z_check),
                      [&](std::ostream& out) { records::write_z_check(out, report, prov); });
  int violations = 0;
  for (const auto& r : report.rows) {
    if (r.lemma_range && !r.within_bound) {
      ++violations;
      std::cerr << "z-check: t=" << r.time << " exceedance " << fmt(r.exceedance)
                << " above bound " << fmt(report.bound) << " + 3 SE\n";
    }
  }
  std::cout << "n=" << report.n << " bound=" << fmt(report.bound)
            << " lemma_horizon=" << report.lemma_horizon << " violations=" << violations
            << " hash=" << prov.config_hash << '\n';
  return violations == 0 ? kOk : kCheckFailed;
}

// Shell counts by breadth-first search from the origin over unit steps.
std::vector<lattice::Count> bfs_shells(int d, int max_t) {
  std::vector<lattice::Count> shells(max_t + 1, 0);
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier{std::vector<int>(d, 0)};
  seen.insert(frontier.front());
  for (int t = 0; t <= max_t; ++t) {
    shells[t] = static_cast<lattice::Count>(frontier.size());
    if (t == max_t) break;
    std::vector<std::vector<int>> next;
    for (const auto& v : frontier) {
      for (int i = 0; i < d; ++i) {
        for (int step : {-1, 1}) {
          auto w = v;
          w[i] += step;
          if (seen.insert(w).second) next.push_back(std::move(w));
        }
      }
    }
    frontier = std::move(next);
  }
  return shells;
}

int cmd_verify_lattice(int max_d, int max_t) {
  if (max_d < 1 || max_d > 4) throw InputError("--max-d must be in [1, 4]");
  if (max_t < 0 || max_t > 15) throw InputError("--max-t must be in [0, 15]");
  int mismatches = 0;
  std::cout << "d,t,sphere_bfs,sphere,ball_bfs,ball,growth_bfs,growth,lower,upper,status\n";
  for (int d = 1; d <= max_d; ++d) {
    const auto shells = bfs_shells(d, max_t);
    lattice::Count ball = 0, grow = 0;
    for (int t = 0; t <= max_t; ++t) {
      ball += shells[t];
      grow += ball;
      const auto s = lattice::sphere_size(d, t);
      const auto b = lattice::ball_size(d, t);
      const auto g = lattice::growth(d, t);
      bool ok = s == shells[t] && b == ball && g == grow;
      std::string lower = "", upper = "";
      if (d >= 2 && t >= d) {
        const auto bounds = lattice::sphere_bounds(d, t);
        lower = fmt(bounds.lower, 10);
        upper = fmt(bounds.upper, 10);
        const auto exact = static_cast<double>(shells[t]);
        ok = ok && bounds.lower <= exact && exact <= bounds.upper;
      }
      if (!ok) ++mismatches;
      std::cout << d << ',' << t << ',' << shells[t] << ',' << s << ',' << ball << ',' << b << ','
                << grow << ',' << g << ',' << lower << ',' << upper << ','
                << (ok ? "ok" : "MISMATCH") << '\n';
    }
  }
  if (mismatches > 0) std::cerr << "verify-lattice: " << mismatches << " mismatching rows\n";
  return mismatches == 0 ? kOk : kCheckFailed;
}

int cmd_channel_info(const RunOptions& opts) {
  const ExperimentConfig cfg = load_config(opts.config);
  const auto& ch = cfg.channel;
  const auto m = ch.moments();
  if (ch.identical()) {
    std::cerr << "warning: Q0 and Q1 are identical (test mode); every moment is degenerate and "
                 "signals carry no information\n";
  }
  std::cout << "channel " << ch.describe() << '\n';
  std::cout << "alpha=" << fmt(m.alpha, 12) << " lambda0=" << fmt(m.lambda0, 12)
            << " lambda1=" << fmt(m.lambda1, 12) << " lambda=" << fmt(m.lambda(), 12)
            << " kl01=" << fmt(m.kl01, 12) << " kl10=" << fmt(m.kl10, 12)
            << " D=" << fmt(m.d_mean, 12) << '\n';
  return kOk;
}

void add_run_options(CLI::App* sub, RunOptions& opts) {
  sub->add_option("config", opts.config, "experiment config (JSON)")->required();
  sub->add_option("--out", opts.out_dir, "override output.dir");
  sub->add_option("--workers", opts.workers, "override workers (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential source localization on lattice cascades"};
  app.require_subcommand(1);
  bool show_kernels = false;
  app.add_flag("--kernels", show_kernels, "print the selected SIMD kernel to stderr");

  RunOptions opts;
  int max_d = 3, max_t = 12;
  auto* simulate = app.add_subcommand("simulate", "run a batch of trials");
  add_run_options(simulate, opts);
  auto* scaling = app.add_subcommand("scaling", "stop-time scaling study over scaling.k_grid");
  add_run_options(scaling, opts);
  auto* profile = app.add_subcommand("variance-profile", "posterior variance by time");
  add_run_options(profile, opts);
  auto* zcheck = app.add_subcommand("z-check", "normalizer concentration check");
  add_run_options(zcheck, opts);
  auto* verify = app.add_subcommand("verify-lattice", "closed forms against BFS enumeration");
  verify->add_option("--max-d", max_d, "largest dimension (<= 4)");
  verify->add_option("--max-t", max_t, "largest radius (<= 15)");
  auto* info = app.add_subcommand("channel-info", "likelihood-ratio moments of a channel");
  info->add_option("config", opts.config, "experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);
  if (show_kernels) std::cerr << "kernels: " << kernels::active().name << '\n';

  try {
    if (*simulate) return cmd_simulate(opts);
    if (*scaling) return cmd_scaling(opts);
    if (*profile) return cmd_profile(opts);
    if (*zcheck) return cmd_z_check(opts);
    if (*verify) return cmd_verify_lattice(max_d, max_t);
    if (*info) return cmd_channel_info(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kBadInput;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
