#pragma once

// Stopping rules bracketing the Bayes-optimal stopping time:
//   T_r  = min{ s : E[f_s(r) | F_s] <= 0 }             (lower bracket)
//   T_+  = min{ s : E[||v0 - v(s)||^2 | F_s] <= |∂N(s)| } (upper bracket)
// with f_s(T) = ||v(T) - v(s)||^2 - (|N(T)| - |N(s)|) and v the
// conditional-mean estimator.

#include <memory>
#include <optional>

#include "cascade/channels.hpp"
#include "cascade/posterior.hpp"
#include "cascade/random.hpp"
#include "cascade/window.hpp"

namespace cascade::stopping {

enum class RuleKind { kTPlus, kTr, kFixedHorizon };

// How a rollout measures the information gained by time r. Both are
// unbiased for E[||v(r) - v(s)||^2 | F_s] by orthogonality of martingale
// increments.
enum class LookaheadEstimator {
  kDirect,              // ||v(r) - v(s)||^2
  kVarianceDifference,  // Var(s) - Var(r)
};

struct StoppingRule {
  RuleKind kind = RuleKind::kTPlus;
  int horizon = 0;  // r for T_r, the forced stop time for fixed-horizon
  int rollouts = 200;
  double guard_z = 0.0;  // T_r stops only if value + guard_z * SE <= 0
  LookaheadEstimator estimator = LookaheadEstimator::kVarianceDifference;
  unsigned rollout_workers = 1;

  static StoppingRule t_plus() { return {}; }
  static StoppingRule t_r(int r, int rollouts,
                          LookaheadEstimator estimator = LookaheadEstimator::kVarianceDifference,
                          double guard_z = 0.0);
  static StoppingRule fixed_horizon(int horizon);
};

struct LookaheadEstimate {
  double value = 0.0;      // estimate of E[f_s(r) | F_s]
  double std_error = 0.0;  // sample sd / sqrt(rollouts_used)
  int rollouts_used = 0;
};

// Everything a rollout needs to simulate the future.
struct LookaheadContext {
  const channels::ChannelPair* channel = nullptr;
  std::shared_ptr<const Window> window;
};

bool t_plus_triggered(const PosteriorState& state, int s);

// Monte-Carlo estimate of E[f_s(r) | F_s]. Rollout m draws from
// stream.child(m), so the result does not depend on `workers`. r == s
// returns exactly zero; r < s throws InputError. The window must cover the
// support out to time r.
LookaheadEstimate lookahead_estimate(const PosteriorState& state, int s, int r, int rollouts,
                                     const LookaheadContext& ctx, const RandomStream& stream,
                                     LookaheadEstimator estimator =
                                         LookaheadEstimator::kVarianceDifference,
                                     unsigned workers = 1);

struct RuleDecision {
  bool stop = false;
  std::optional<LookaheadEstimate> lookahead;
};

// T_r check at step s; for s >= r the rule stops unconditionally.
RuleDecision t_r_triggered(const PosteriorState& state, int s, const StoppingRule& rule,
                           const LookaheadContext& ctx, const RandomStream& stream);

// Dispatches on rule.kind. `stream` seeds lookahead rollouts only.
RuleDecision evaluate(const StoppingRule& rule, const PosteriorState& state, int s,
                      const LookaheadContext& ctx, const RandomStream& stream);

// Default lookahead horizon: growth_inverse(d, coeff * log n), at least 1.
int default_lookahead_horizon(int d, lattice::Count n, double coeff = 6.0);

}  // namespace cascade::stopping
