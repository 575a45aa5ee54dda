#pragma once

// Ground truth: a cascade that reaches every vertex within L1 distance t of
// the hidden source by time t, observed through a noisy channel.

#include <memory>
#include <random>
#include <vector>

#include "cascade/channels.hpp"
#include "cascade/lattice.hpp"
#include "cascade/window.hpp"

namespace cascade {

// Signal field y(time) over the window, in window index order.
struct ObservationFrame {
  int time = 0;
  std::shared_ptr<const Window> window;
  std::vector<double> values;
};

class WorldState {
 public:
  WorldState(lattice::Vertex source, std::shared_ptr<const Window> window, int time = 0);

  const lattice::Vertex& source() const noexcept { return source_; }
  int time() const noexcept { return time_; }
  const Window& window() const noexcept { return *window_; }
  const std::shared_ptr<const Window>& window_ptr() const noexcept { return window_; }

  bool infected(std::size_t window_index) const {
    return distance_[window_index] <= static_cast<lattice::Count>(time_);
  }

  // Emits y(time) and advances time by one.
  ObservationFrame next_frame(const channels::ChannelPair& ch, std::mt19937_64& rng);

 private:
  lattice::Vertex source_;
  std::shared_ptr<const Window> window_;
  int time_;
  std::vector<lattice::Count> distance_;  // per window vertex, to the source
};

// Vertices reached by time t: the radius-t ball around source.
std::vector<lattice::Vertex> infected_set(const lattice::Vertex& source, int t);

inline ObservationFrame next_frame(WorldState& world, const channels::ChannelPair& ch,
                                   std::mt19937_64& rng) {
  return world.next_frame(ch, rng);
}

}  // namespace cascade
