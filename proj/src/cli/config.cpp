#include "cascade/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "cascade/errors.hpp"

namespace cascade {

using nlohmann::json;

namespace {

constexpr lattice::Count kMaxWindowVertices = 50'000'000;

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown fields.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(display(), "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class Int>
  std::optional<Int> integer(const std::string& key, long long lo, long long hi) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
    if (v->is_number_unsigned()) {
      const auto u = v->get<unsigned long long>();
      if (u > static_cast<unsigned long long>(hi)) {
        throw ConfigError(field(key), "must be <= " + std::to_string(hi));
      }
      return static_cast<Int>(u);
    }
    const auto x = v->get<long long>();
    if (x < lo || x > hi) {
      throw ConfigError(field(key),
                        "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<Int>(x);
  }

  std::optional<double> number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
    }
  }

  std::string display() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

channels::ChannelPair parse_channel(Section sec, bool test_mode) {
  const auto kind = sec.string("kind").value_or("gaussian_shift");
  channels::ChannelPair ch = channels::ChannelPair::gaussian_shift(1.0);
  try {
    if (kind == "gaussian_shift") {
      const auto mu = sec.number("mu");
      if (!mu) throw ConfigError(sec.field("mu"), "required for gaussian_shift");
      if (*mu < 0.0 || (*mu == 0.0 && !test_mode)) {
        throw ConfigError(sec.field("mu"), "must be > 0 (0 only with flags.test_mode_channel)");
      }
      ch = channels::ChannelPair::gaussian_shift(*mu, test_mode);
    } else if (kind == "discrete") {
      auto q0 = sec.numbers("q0");
      auto q1 = sec.numbers("q1");
      if (!q0) throw ConfigError(sec.field("q0"), "required for discrete");
      if (!q1) throw ConfigError(sec.field("q1"), "required for discrete");
      ch = channels::ChannelPair::discrete(*q0, *q1, test_mode);
    } else {
      throw ConfigError(sec.field("kind"), "expected gaussian_shift or discrete, got '" + kind + "'");
    }
  } catch (const InputError& e) {
    throw ConfigError(sec.display(), e.what());
  }
  sec.reject_unknown();
  return ch;
}

RuleConfig parse_rule(Section sec) {
  RuleConfig rule;
  const auto kind = sec.string("kind").value_or("t_plus");
  if (kind == "t_plus") {
    rule.kind = stopping::RuleKind::kTPlus;
  } else if (kind == "t_r") {
    rule.kind = stopping::RuleKind::kTr;
    rule.r = sec.integer<int>("r", 1, 100000);
    if (auto c = sec.number("r_coeff")) {
      if (*c <= 0.0) throw ConfigError(sec.field("r_coeff"), "must be > 0");
      rule.r_coeff = *c;
    }
    rule.rollouts = sec.integer<int>("rollouts", 1, 10'000'000).value_or(rule.rollouts);
    if (auto z = sec.number("guard_z")) {
      if (*z < 0.0) throw ConfigError(sec.field("guard_z"), "must be >= 0");
      rule.guard_z = *z;
    }
    const auto est = sec.string("estimator").value_or("variance_difference");
    if (est == "variance_difference") {
      rule.estimator = stopping::LookaheadEstimator::kVarianceDifference;
    } else if (est == "direct") {
      rule.estimator = stopping::LookaheadEstimator::kDirect;
    } else {
      throw ConfigError(sec.field("estimator"), "expected variance_difference or direct");
    }
  } else if (kind == "fixed_horizon") {
    rule.kind = stopping::RuleKind::kFixedHorizon;
    const auto h = sec.integer<int>("horizon", 0, 100000);
    if (!h) throw ConfigError(sec.field("horizon"), "required for fixed_horizon");
    rule.horizon = *h;
  } else {
    throw ConfigError(sec.field("kind"), "expected t_plus, t_r or fixed_horizon, got '" + kind + "'");
  }
  sec.reject_unknown();
  return rule;
}

const char* rule_name(stopping::RuleKind k) {
  switch (k) {
    case stopping::RuleKind::kTPlus: return "t_plus";
    case stopping::RuleKind::kTr: return "t_r";
    case stopping::RuleKind::kFixedHorizon: return "fixed_horizon";
  }
  return "?";
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "");

  cfg.dimension = root.integer<int>("dimension", 1, kMaxDimension).value_or(cfg.dimension);
  cfg.prior_radius = root.integer<int>("prior_radius", 0, 10'000'000).value_or(cfg.prior_radius);
  cfg.t_max = root.integer<int>("t_max", 0, 100000);
  cfg.trials = root.integer<int>("trials", 0, 100'000'000).value_or(cfg.trials);
  if (const json* v = root.find("master_seed")) {
    const bool ok = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
    if (!ok) throw ConfigError("master_seed", "expected a nonnegative integer");
    cfg.master_seed = v->get<std::uint64_t>();
  }
  cfg.workers = root.integer<unsigned>("workers", 0, 4096).value_or(cfg.workers);

  if (const json* f = root.find("flags")) {
    Section flags(*f, "flags");
    cfg.snapshot_export = flags.boolean("snapshot_export").value_or(false);
    cfg.frame_dump = flags.boolean("frame_dump").value_or(false);
    cfg.accelerated_posterior = flags.boolean("accelerated_posterior").value_or(false);
    cfg.test_mode_channel = flags.boolean("test_mode_channel").value_or(false);
    flags.reject_unknown();
  }

  const json* ch = root.find("channel");
  if (!ch) throw ConfigError("channel", "required");
  cfg.channel = parse_channel(Section(*ch, "channel"), cfg.test_mode_channel);

  if (const json* r = root.find("rule")) cfg.rule = parse_rule(Section(*r, "rule"));

  if (const json* o = root.find("output")) {
    Section out(*o, "output");
    cfg.output.dir = out.string("dir").value_or(cfg.output.dir);
    cfg.output.results = out.string("results").value_or(cfg.output.results);
    cfg.output.summary = out.string("summary").value_or(cfg.output.summary);
    cfg.output.scaling = out.string("scaling").value_or(cfg.output.scaling);
    cfg.output.profile = out.string("profile").value_or(cfg.output.profile);
    cfg.output.z_check = out.string("z_check").value_or(cfg.output.z_check);
    out.reject_unknown();
  }

  if (const json* s = root.find("scaling")) {
    Section sc(*s, "scaling");
    if (const json* grid = sc.find("k_grid")) {
      if (!grid->is_array() || grid->empty()) {
        throw ConfigError("scaling.k_grid", "expected a non-empty array of integers");
      }
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const std::string path = "scaling.k_grid[" + std::to_string(i) + "]";
        if (!(*grid)[i].is_number_integer() || (*grid)[i].get<long long>() < 0) {
          throw ConfigError(path, "expected a nonnegative integer");
        }
        const int k = (*grid)[i].get<int>();
        if (!cfg.k_grid.empty() && k <= cfg.k_grid.back()) {
          throw ConfigError(path, "k_grid must be strictly increasing");
        }
        cfg.k_grid.push_back(k);
      }
    }
    sc.reject_unknown();
  }

  if (const json* z = root.find("z_check")) {
    Section zc(*z, "z_check");
    if (auto eps = zc.number("eps")) {
      if (*eps <= 0.0) throw ConfigError("z_check.eps", "must be > 0");
      cfg.z_eps = *eps;
    }
    cfg.z_horizon = zc.integer<int>("horizon", 0, 100000);
    zc.reject_unknown();
  }
  root.reject_unknown();

  // Cross-field checks.
  int t_max = 0;
  lattice::Count window = 0;
  try {
    t_max = effective_t_max(cfg);
    window = lattice::ball_size(cfg.dimension, cfg.prior_radius + t_max);
  } catch (const std::overflow_error&) {
    throw ConfigError("prior_radius", "lattice counts overflow for this dimension and radius");
  }
  if (window > kMaxWindowVertices) {
    throw ConfigError("prior_radius", "window of " + std::to_string(window) +
                                          " vertices exceeds the limit of " +
                                          std::to_string(kMaxWindowVertices));
  }
  if (cfg.rule.kind == stopping::RuleKind::kTr) {
    const int r = resolve_rule(cfg).horizon;
    if (r > t_max) {
      throw ConfigError(cfg.rule.r ? "rule.r" : "rule.r_coeff",
                        "lookahead horizon " + std::to_string(r) + " exceeds t_max " +
                            std::to_string(t_max));
    }
  }
  if (cfg.rule.kind == stopping::RuleKind::kFixedHorizon && cfg.rule.horizon > t_max) {
    throw ConfigError("rule.horizon", "exceeds t_max " + std::to_string(t_max));
  }
  if (cfg.z_horizon && *cfg.z_horizon > t_max) {
    throw ConfigError("z_check.horizon", "exceeds t_max " + std::to_string(t_max));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  // A scaling grid derives t_max and r per radius, so they are only pinned
  // when they were pinned in the input.
  const bool per_radius = !cfg.k_grid.empty();
  json doc;
  doc["dimension"] = cfg.dimension;
  doc["prior_radius"] = cfg.prior_radius;
  if (!per_radius) {
    doc["t_max"] = effective_t_max(cfg);
  } else if (cfg.t_max) {
    doc["t_max"] = *cfg.t_max;
  }
  doc["trials"] = cfg.trials;
  doc["master_seed"] = cfg.master_seed;
  doc["workers"] = cfg.workers;

  json ch;
  if (cfg.channel.kind() == channels::ChannelKind::kGaussianShift) {
    ch["kind"] = "gaussian_shift";
    ch["mu"] = cfg.channel.mu();
  } else {
    ch["kind"] = "discrete";
    ch["q0"] = cfg.channel.q0();
    ch["q1"] = cfg.channel.q1();
  }
  doc["channel"] = ch;

  json rule;
  rule["kind"] = rule_name(cfg.rule.kind);
  if (cfg.rule.kind == stopping::RuleKind::kTr) {
    if (!per_radius) {
      rule["r"] = resolve_rule(cfg).horizon;
    } else if (cfg.rule.r) {
      rule["r"] = *cfg.rule.r;
    }
    rule["r_coeff"] = cfg.rule.r_coeff;
    rule["rollouts"] = cfg.rule.rollouts;
    rule["guard_z"] = cfg.rule.guard_z;
    rule["estimator"] = cfg.rule.estimator == stopping::LookaheadEstimator::kDirect
                            ? "direct"
                            : "variance_difference";
  } else if (cfg.rule.kind == stopping::RuleKind::kFixedHorizon) {
    rule["horizon"] = cfg.rule.horizon;
  }
  doc["rule"] = rule;

  doc["output"] = {{"dir", cfg.output.dir},         {"results", cfg.output.results},
                   {"summary", cfg.output.summary}, {"scaling", cfg.output.scaling},
                   {"profile", cfg.output.profile}, {"z_check", cfg.output.z_check}};
  doc["flags"] = {{"snapshot_export", cfg.snapshot_export},
                  {"frame_dump", cfg.frame_dump},
                  {"accelerated_posterior", cfg.accelerated_posterior},
                  {"test_mode_channel", cfg.test_mode_channel}};
  if (!cfg.k_grid.empty()) doc["scaling"] = {{"k_grid", cfg.k_grid}};
  json z = {{"eps", cfg.z_eps}};
  if (cfg.z_horizon) z["horizon"] = *cfg.z_horizon;
  doc["z_check"] = z;
  return doc;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // workers and output locations do not affect results.
  json doc = to_json(cfg);
  doc.erase("workers");
  doc.erase("output");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

lattice::Count prior_size(const ExperimentConfig& cfg) {
  return lattice::ball_size(cfg.dimension, cfg.prior_radius);
}

int default_t_max(int dimension, lattice::Count n) {
  return 4 * lattice::growth_inverse(dimension, 10.0 * std::log(static_cast<double>(n)));
}

int effective_t_max(const ExperimentConfig& cfg) {
  return cfg.t_max ? *cfg.t_max : default_t_max(cfg.dimension, prior_size(cfg));
}

stopping::StoppingRule resolve_rule(const ExperimentConfig& cfg) {
  switch (cfg.rule.kind) {
    case stopping::RuleKind::kTPlus:
      return stopping::StoppingRule::t_plus();
    case stopping::RuleKind::kFixedHorizon:
      return stopping::StoppingRule::fixed_horizon(cfg.rule.horizon);
    case stopping::RuleKind::kTr: {
      const int r = cfg.rule.r ? *cfg.rule.r
                               : stopping::default_lookahead_horizon(cfg.dimension, prior_size(cfg),
                                                                     cfg.rule.r_coeff);
      return stopping::StoppingRule::t_r(r, cfg.rule.rollouts, cfg.rule.estimator,
                                         cfg.rule.guard_z);
    }
  }
  return {};
}

TrialSetup make_setup(const ExperimentConfig& cfg) {
  return TrialSetup::make(cfg.dimension, cfg.prior_radius, effective_t_max(cfg), cfg.channel,
                          cfg.accelerated_posterior ? NeighborhoodPath::kAccelerated
                                                    : NeighborhoodPath::kDirect);
}

unsigned resolve_workers(unsigned requested) {
  unsigned workers = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* cap = std::getenv("CASCADE_MAX_WORKERS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) workers = std::min(workers, static_cast<unsigned>(v));
  }
  return workers;
}

}  // namespace cascade
