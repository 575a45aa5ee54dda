#pragma once

// Bayes filter over the source location.
//
// For every candidate u in the prior support the filter keeps
//   log X_u(t) = sum_{s<=t} sum_{w in N_u(s)} llr(y_w(s)),
// so pi_u(t) = X_u(t) / Z(t). Weights are never exponentiated without first
// subtracting their maximum.

#include <memory>
#include <span>
#include <vector>

#include "cascade/cascade_sim.hpp"
#include "cascade/channels.hpp"
#include "cascade/lattice.hpp"

namespace cascade {

enum class NeighborhoodPath {
  kDirect,       // sum every run of N_u(t), O(n |N(t)|) per frame
  kAccelerated,  // prefix sums (d = 1) or rotated 2D prefix sums (d = 2)
};

class PosteriorState {
 public:
  // Uniform prior; time() == -1.
  static PosteriorState uniform(const lattice::PriorSupport& support,
                                NeighborhoodPath path = NeighborhoodPath::kDirect);

  // Arbitrary initial log-weights (one per support vertex, lexicographic).
  static PosteriorState from_log_weights(const lattice::PriorSupport& support,
                                         std::vector<double> log_weights,
                                         NeighborhoodPath path = NeighborhoodPath::kDirect);

  // Absorbs y(time()+1). Throws SequencingError if frame.time is not
  // time()+1 and CoverageError if the frame's window misses part of some
  // candidate's neighborhood.
  void absorb(const ObservationFrame& frame, const channels::ChannelPair& ch);

  const lattice::PriorSupport& support() const noexcept { return geometry_->support; }
  const std::vector<lattice::Vertex>& candidates() const noexcept { return geometry_->candidates; }
  int dimension() const noexcept { return support().dimension(); }
  int time() const noexcept { return time_; }
  NeighborhoodPath path() const noexcept { return path_; }

  std::span<const double> log_weights() const noexcept { return log_weights_; }
  std::vector<double> probabilities() const;

  // Conditional mean, absolute coordinates.
  std::vector<double> mean() const;
  // Conditional mean relative to the support center (exact under shifts).
  const std::vector<double>& mean_offset() const noexcept { return mean_offset_; }
  // E[ ||v0 - mean||^2 | F_t ].
  double variance() const noexcept { return variance_; }
  double log_normalizer() const noexcept { return log_normalizer_; }
  // argmax pi, ties to the lexicographically smallest vertex.
  const lattice::Vertex& map_estimate() const { return candidates()[map_index_]; }

 private:
  struct Geometry {
    lattice::PriorSupport support;
    std::vector<lattice::Vertex> candidates;
    // offsets[i][j]: coordinate i of candidate j minus the support center.
    std::vector<std::vector<double>> offsets;
  };

  PosteriorState() = default;
  void refresh();
  void neighborhood_sums(const ObservationFrame& frame, std::span<const double> llr,
                         std::span<double> out) const;

  std::shared_ptr<const Geometry> geometry_;
  NeighborhoodPath path_ = NeighborhoodPath::kDirect;
  int time_ = -1;
  std::vector<double> log_weights_;

  std::vector<double> mean_offset_;
  double variance_ = 0.0;
  double log_normalizer_ = 0.0;
  std::size_t map_index_ = 0;
};

// Functional form of absorb.
PosteriorState update(PosteriorState state, const ObservationFrame& frame,
                      const channels::ChannelPair& ch);

}  // namespace cascade
