#include "cascade/window.hpp"

#include <string>

#include "cascade/errors.hpp"

namespace cascade {

using lattice::Coord;
using lattice::Vertex;

Window::Window(Vertex center, int radius)
    : center_(std::move(center)), radius_(radius), vertices_(lattice::enumerate_ball(center_, radius)) {
  const int d = dimension();
  if (d > kMaxDimension) {
    throw InputError("window: dimension " + std::to_string(d) + " exceeds " +
                     std::to_string(kMaxDimension));
  }
  std::size_t slots = 1;
  for (int i = 0; i + 1 < d; ++i) slots *= static_cast<std::size_t>(2 * radius_ + 1);
  row_start_.assign(slots, 0);

  std::vector<Coord> prefix(static_cast<std::size_t>(d - 1));
  for (std::size_t idx = 0; idx < vertices_.size(); ++idx) {
    const Vertex& v = vertices_[idx];
    bool row_head = idx == 0;
    if (!row_head) {
      for (int i = 0; i + 1 < d; ++i) {
        if (vertices_[idx - 1][i] != v[i]) {
          row_head = true;
          break;
        }
      }
    }
    if (!row_head) continue;
    for (int i = 0; i + 1 < d; ++i) prefix[i] = v[i] - center_[i];
    row_start_[prefix_slot(prefix)] = idx;
  }
}

std::size_t Window::prefix_slot(std::span<const Coord> rel_prefix) const {
  std::size_t slot = 0;
  const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
  for (Coord c : rel_prefix) slot = slot * side + static_cast<std::size_t>(c + radius_);
  return slot;
}

std::optional<std::size_t> Window::index_of(const Vertex& v) const {
  if (v.dimension() != dimension()) throw InputError("window: vertex dimension mismatch");
  if (lattice::l1_distance(v, center_) > static_cast<lattice::Count>(radius_)) return std::nullopt;
  const int d = dimension();
  std::vector<Coord> prefix(static_cast<std::size_t>(d - 1));
  Coord norm = 0;
  for (int i = 0; i + 1 < d; ++i) {
    prefix[i] = v[i] - center_[i];
    norm += prefix[i] < 0 ? -prefix[i] : prefix[i];
  }
  const Coord last = v[d - 1] - center_[d - 1];
  return row_start_[prefix_slot(prefix)] + static_cast<std::size_t>(last + (radius_ - norm));
}

bool Window::covers(const Vertex& u, int t) const {
  return lattice::l1_distance(u, center_) + static_cast<lattice::Count>(t) <=
         static_cast<lattice::Count>(radius_);
}

}  // namespace cascade
