#pragma once

// One trial: sample a source, stream frames into the posterior, stop when
// the rule fires or t_max is reached.

#include <memory>
#include <vector>

#include "cascade/cascade_sim.hpp"
#include "cascade/channels.hpp"
#include "cascade/posterior.hpp"
#include "cascade/random.hpp"
#include "cascade/stopping.hpp"

namespace cascade {

// Immutable per-experiment data shared by all trials.
struct TrialSetup {
  lattice::PriorSupport support;
  int t_max = 0;
  channels::ChannelPair channel;
  std::shared_ptr<const Window> window;  // radius = support radius + t_max
  PosteriorState prior;

  static TrialSetup make(int dimension, int prior_radius, int t_max, channels::ChannelPair channel,
                         NeighborhoodPath path = NeighborhoodPath::kDirect);
};

struct LookaheadRecord {
  int step = 0;
  stopping::LookaheadEstimate estimate;
};

struct TrialRecord {
  int trial_id = 0;
  lattice::Vertex source;
  int stop_time = 0;
  double squared_error = 0.0;
  lattice::Count infection_cost = 0;  // ball_size(d, stop_time)
  double total_loss = 0.0;            // squared_error + infection_cost
  std::vector<double> estimate;       // conditional mean at stop_time
  std::vector<double> variance_trajectory;        // Var after frame s, s = 0..stop_time
  std::vector<double> log_normalizer_trajectory;  // log Z(s), s = 0..stop_time
  bool truncated = false;                         // no trigger by t_max
  std::vector<LookaheadRecord> lookahead;
};

// Optional per-step hooks (frame dumps, posterior snapshots).
class TrajectoryObserver {
 public:
  virtual ~TrajectoryObserver() = default;
  virtual void on_frame(const ObservationFrame& /*frame*/) {}
  virtual void on_posterior(const PosteriorState& /*state*/) {}
};

// Stream tag under which T_r rollouts for step s draw: stream.child(kLookaheadTag).child(s).
inline constexpr std::uint64_t kLookaheadTag = 0x6c6f6f6b61686561ULL;

// `stream` is the trial's dedicated stream; the source and every frame are
// drawn from it in order, lookahead rollouts only from its children, so
// rules that differ only in kind see the same source and frames.
TrialRecord run_trajectory(const TrialSetup& setup, const stopping::StoppingRule& rule,
                           RandomStream stream, int trial_id = 0,
                           TrajectoryObserver* observer = nullptr);

}  // namespace cascade
