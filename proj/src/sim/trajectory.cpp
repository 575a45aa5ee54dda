#include "cascade/trial.hpp"

#include <random>
#include <string>

#include "cascade/errors.hpp"

namespace cascade {

TrialSetup TrialSetup::make(int dimension, int prior_radius, int t_max,
                            channels::ChannelPair channel, NeighborhoodPath path) {
  if (t_max < 0) throw InputError("t_max must be >= 0");
  auto support = lattice::PriorSupport::ball(lattice::Vertex::origin(dimension), prior_radius);
  auto window = std::make_shared<const Window>(support.center, prior_radius + t_max);
  auto prior = PosteriorState::uniform(support, path);
  return TrialSetup{std::move(support), t_max, std::move(channel), std::move(window),
                    std::move(prior)};
}

TrialRecord run_trajectory(const TrialSetup& setup, const stopping::StoppingRule& rule,
                           RandomStream stream, int trial_id, TrajectoryObserver* observer) {
  if (rule.kind == stopping::RuleKind::kTr && rule.horizon > setup.t_max) {
    throw InputError("T_r horizon " + std::to_string(rule.horizon) + " exceeds t_max " +
                     std::to_string(setup.t_max));
  }
  auto& engine = stream.engine();
  const auto& candidates = setup.prior.candidates();
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.source = candidates[pick(engine)];

  WorldState world(rec.source, setup.window, 0);
  PosteriorState posterior = setup.prior;
  const stopping::LookaheadContext ctx{&setup.channel, setup.window};
  const RandomStream lookahead_root = stream.child(kLookaheadTag);

  int s = 0;
  for (;; ++s) {
    const ObservationFrame frame = world.next_frame(setup.channel, engine);
    if (observer) observer->on_frame(frame);
    posterior.absorb(frame, setup.channel);
    if (observer) observer->on_posterior(posterior);
    rec.variance_trajectory.push_back(posterior.variance());
    rec.log_normalizer_trajectory.push_back(posterior.log_normalizer());

    const auto decision = stopping::evaluate(rule, posterior, s, ctx, lookahead_root.child(s));
    if (decision.lookahead) rec.lookahead.push_back({s, *decision.lookahead});
    if (decision.stop) break;
    if (s == setup.t_max) {
      rec.truncated = true;
      break;
    }
  }

  rec.stop_time = s;
  rec.estimate = posterior.mean();
  double err = 0.0;
  for (int i = 0; i < rec.source.dimension(); ++i) {
    const double diff = rec.estimate[i] - static_cast<double>(rec.source[i]);
    err += diff * diff;
  }
  rec.squared_error = err;
  rec.infection_cost = lattice::ball_size(rec.source.dimension(), s);
  rec.total_loss = rec.squared_error + static_cast<double>(rec.infection_cost);
  return rec;
}

}  // namespace cascade
