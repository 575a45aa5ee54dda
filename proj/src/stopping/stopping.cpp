#include "cascade/stopping.hpp"

#include <cmath>
#include <random>
#include <string>

#include "cascade/cascade_sim.hpp"
#include "cascade/errors.hpp"
#include "cascade/parallel.hpp"

namespace cascade::stopping {

StoppingRule StoppingRule::t_r(int r, int rollouts, LookaheadEstimator estimator, double guard_z) {
  if (r < 1) throw InputError("T_r horizon must be >= 1");
  if (rollouts < 1) throw InputError("T_r needs at least one rollout");
  StoppingRule rule;
  rule.kind = RuleKind::kTr;
  rule.horizon = r;
  rule.rollouts = rollouts;
  rule.estimator = estimator;
  rule.guard_z = guard_z;
  return rule;
}

StoppingRule StoppingRule::fixed_horizon(int horizon) {
  if (horizon < 0) throw InputError("fixed horizon must be >= 0");
  StoppingRule rule;
  rule.kind = RuleKind::kFixedHorizon;
  rule.horizon = horizon;
  return rule;
}

bool t_plus_triggered(const PosteriorState& state, int s) {
  return state.variance() <= static_cast<double>(lattice::sphere_size(state.dimension(), s));
}

LookaheadEstimate lookahead_estimate(const PosteriorState& state, int s, int r, int rollouts,
                                     const LookaheadContext& ctx, const RandomStream& stream,
                                     LookaheadEstimator estimator, unsigned workers) {
  if (r < s) {
    throw InputError("lookahead horizon r=" + std::to_string(r) + " precedes s=" +
                     std::to_string(s));
  }
  if (r == s) return {};
  if (state.time() != s) {
    throw SequencingError("lookahead at s=" + std::to_string(s) + " on a posterior at time " +
                          std::to_string(state.time()));
  }
  if (rollouts < 1) throw InputError("lookahead needs at least one rollout");
  if (!ctx.channel || !ctx.window) throw InputError("lookahead context is incomplete");

  const auto probs = state.probabilities();
  const std::discrete_distribution<std::size_t> source_law(probs.begin(), probs.end());
  const auto& candidates = state.candidates();

  std::vector<double> gains(static_cast<std::size_t>(rollouts));
  parallel_for(gains.size(), workers, [&](std::size_t m) {
    RandomStream sub = stream.child(m);
    auto pick = source_law;
    WorldState world(candidates[pick(sub.engine())], ctx.window, s + 1);
    PosteriorState future = state;
    for (int tau = s + 1; tau <= r; ++tau) future.absorb(world.next_frame(*ctx.channel, sub.engine()), *ctx.channel);
    if (estimator == LookaheadEstimator::kDirect) {
      double sq = 0.0;
      for (std::size_t i = 0; i < future.mean_offset().size(); ++i) {
        const double diff = future.mean_offset()[i] - state.mean_offset()[i];
        sq += diff * diff;
      }
      gains[m] = sq;
    } else {
      gains[m] = state.variance() - future.variance();
    }
  });

  double mean = 0.0;
  for (double g : gains) mean += g;
  mean /= static_cast<double>(gains.size());
  double ss = 0.0;
  for (double g : gains) ss += (g - mean) * (g - mean);
  const double sd = gains.size() > 1 ? std::sqrt(ss / static_cast<double>(gains.size() - 1)) : 0.0;

  const int d = state.dimension();
  const double cost =
      static_cast<double>(lattice::ball_size(d, r)) - static_cast<double>(lattice::ball_size(d, s));
  LookaheadEstimate out;
  out.value = mean - cost;
  out.std_error = sd / std::sqrt(static_cast<double>(gains.size()));
  out.rollouts_used = rollouts;
  return out;
}

RuleDecision t_r_triggered(const PosteriorState& state, int s, const StoppingRule& rule,
                           const LookaheadContext& ctx, const RandomStream& stream) {
  // f_r(r) = 0, so the condition holds at s = r and is vacuous beyond.
  if (s >= rule.horizon) return {true, std::nullopt};
  RuleDecision decision;
  decision.lookahead = lookahead_estimate(state, s, rule.horizon, rule.rollouts, ctx, stream,
                                          rule.estimator, rule.rollout_workers);
  decision.stop = decision.lookahead->value + rule.guard_z * decision.lookahead->std_error <= 0.0;
  return decision;
}

RuleDecision evaluate(const StoppingRule& rule, const PosteriorState& state, int s,
                      const LookaheadContext& ctx, const RandomStream& stream) {
  switch (rule.kind) {
    case RuleKind::kTPlus:
      return {t_plus_triggered(state, s), std::nullopt};
    case RuleKind::kFixedHorizon:
      return {s >= rule.horizon, std::nullopt};
    case RuleKind::kTr:
      return t_r_triggered(state, s, rule, ctx, stream);
  }
  return {};
}

int default_lookahead_horizon(int d, lattice::Count n, double coeff) {
  return std::max(1, lattice::growth_inverse(d, coeff * std::log(static_cast<double>(n))));
}

}  // namespace cascade::stopping
