#include "cascade/cascade_sim.hpp"

#include "cascade/errors.hpp"

namespace cascade {

WorldState::WorldState(lattice::Vertex source, std::shared_ptr<const Window> window, int time)
    : source_(std::move(source)), window_(std::move(window)), time_(time) {
  if (!window_) throw InputError("world: missing window");
  if (time_ < 0) throw InputError("world: time must be >= 0");
  const auto& vertices = window_->vertices();
  distance_.resize(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    distance_[i] = lattice::l1_distance(vertices[i], source_);
  }
}

ObservationFrame WorldState::next_frame(const channels::ChannelPair& ch, std::mt19937_64& rng) {
  ObservationFrame frame;
  frame.time = time_;
  frame.window = window_;
  frame.values.resize(distance_.size());
  channels::SignalSampler draw(ch);
  for (std::size_t i = 0; i < distance_.size(); ++i) frame.values[i] = draw(infected(i), rng);
  ++time_;
  return frame;
}

std::vector<lattice::Vertex> infected_set(const lattice::Vertex& source, int t) {
  return lattice::enumerate_ball(source, t);
}

}  // namespace cascade
