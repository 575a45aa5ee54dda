#pragma once

// The finite region of the lattice on which signals are generated: the L1
// ball of radius (prior radius + t_max) around the prior center. Vertices are
// stored in lexicographic order, so for a fixed prefix of the first d-1
// coordinates the last coordinate runs over a contiguous index range. Any
// L1 ball inside the window is therefore a set of contiguous runs.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cascade/lattice.hpp"

namespace cascade {

inline constexpr int kMaxDimension = 8;

class Window {
 public:
  Window(lattice::Vertex center, int radius);

  const lattice::Vertex& center() const noexcept { return center_; }
  int radius() const noexcept { return radius_; }
  int dimension() const noexcept { return center_.dimension(); }
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<lattice::Vertex>& vertices() const noexcept { return vertices_; }

  std::optional<std::size_t> index_of(const lattice::Vertex& v) const;

  // True iff the radius-t ball around u lies inside the window.
  bool covers(const lattice::Vertex& u, int t) const;

  // Calls f(first_index, length) for every run of the radius-t ball around
  // u, in increasing index order. Requires covers(u, t).
  template <class F>
  void for_each_run(const lattice::Vertex& u, int t, F&& f) const;

 private:
  std::size_t prefix_slot(std::span<const lattice::Coord> rel_prefix) const;

  lattice::Vertex center_;
  int radius_;
  std::vector<lattice::Vertex> vertices_;
  // Dense table over the prefix box [-R, R]^(d-1): index of the first vertex
  // of each row (rows exist for every prefix with |prefix|_1 <= R).
  std::vector<std::size_t> row_start_;
};

template <class F>
void Window::for_each_run(const lattice::Vertex& u, int t, F&& f) const {
  using lattice::Coord;
  const int d = dimension();
  const std::size_t pd = static_cast<std::size_t>(d - 1);
  std::array<Coord, kMaxDimension> up{}, q{};
  for (std::size_t i = 0; i < pd; ++i) up[i] = u[i] - center_[i];
  const Coord u_last = u[pd] - center_[pd];

  auto emit = [&](Coord remaining) {
    Coord q_norm = 0;
    for (std::size_t i = 0; i < pd; ++i) q_norm += q[i] < 0 ? -q[i] : q[i];
    const Coord row_half = radius_ - q_norm;
    const std::size_t first =
        row_start_[prefix_slot(std::span<const Coord>(q.data(), pd))] + static_cast<std::size_t>(u_last - remaining + row_half);
    f(first, static_cast<std::size_t>(2 * remaining + 1));
  };
  auto walk = [&](auto&& self, std::size_t axis, Coord remaining) -> void {
    if (axis == pd) {
      emit(remaining);
      return;
    }
    for (Coord x = up[axis] - remaining; x <= up[axis] + remaining; ++x) {
      q[axis] = x;
      self(self, axis + 1, remaining - (x > up[axis] ? x - up[axis] : up[axis] - x));
    }
  };
  walk(walk, 0, t);
}

}  // namespace cascade
