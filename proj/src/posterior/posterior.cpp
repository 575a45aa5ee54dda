#include "cascade/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"

namespace cascade {

using lattice::Coord;
using lattice::Vertex;

namespace {

// d = 1: window is one row in coordinate order.
void sums_by_prefix_1d(const Window& window, std::span<const Vertex> candidates, int t,
                       std::span<const double> llr, std::span<double> out) {
  thread_local std::vector<double> prefix;
  prefix.resize(llr.size() + 1);
  prefix[0] = 0.0;
  for (std::size_t i = 0; i < llr.size(); ++i) prefix[i + 1] = prefix[i] + llr[i];
  const Coord first = window.center()[0] - window.radius();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto lo = static_cast<std::size_t>(candidates[j][0] - t - first);
    const auto hi = static_cast<std::size_t>(candidates[j][0] + t - first);
    out[j] = prefix[hi + 1] - prefix[lo];
  }
}

// d = 2: under p = x + y, q = x - y an L1 ball is the square
// |p - p_u| <= t, |q - q_u| <= t on the sublattice p ≡ q (mod 2).
void sums_by_rotated_prefix_2d(const Window& window, std::span<const Vertex> candidates, int t,
                               std::span<const double> llr, std::span<double> out) {
  const Coord r = window.radius();
  const std::size_t side = static_cast<std::size_t>(2 * r + 1);
  const std::size_t stride = side + 1;
  thread_local std::vector<double> table;
  table.assign(stride * stride, 0.0);
  const Coord cx = window.center()[0];
  const Coord cy = window.center()[1];
  const auto& vertices = window.vertices();
  // Scatter into row p+1, column q+1, then integrate rows and columns.
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Coord x = vertices[i][0] - cx;
    const Coord y = vertices[i][1] - cy;
    const auto row = static_cast<std::size_t>(x + y + r + 1);
    const auto col = static_cast<std::size_t>(x - y + r + 1);
    table[row * stride + col] = llr[i];
  }
  for (std::size_t row = 1; row < stride; ++row) {
    double running = 0.0;
    double* line = table.data() + row * stride;
    const double* above = line - stride;
    for (std::size_t col = 1; col < stride; ++col) {
      running += line[col];
      line[col] = above[col] + running;
    }
  }
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Coord x = candidates[j][0] - cx;
    const Coord y = candidates[j][1] - cy;
    const auto p0 = static_cast<std::size_t>(x + y - t + r);
    const auto p1 = static_cast<std::size_t>(x + y + t + r + 1);
    const auto q0 = static_cast<std::size_t>(x - y - t + r);
    const auto q1 = static_cast<std::size_t>(x - y + t + r + 1);
    out[j] = (table[p1 * stride + q1] - table[p0 * stride + q1]) -
             (table[p1 * stride + q0] - table[p0 * stride + q0]);
  }
}

}  // namespace

PosteriorState PosteriorState::uniform(const lattice::PriorSupport& support, NeighborhoodPath path) {
  return from_log_weights(support, std::vector<double>(support.size, 0.0), path);
}

PosteriorState PosteriorState::from_log_weights(const lattice::PriorSupport& support,
                                                std::vector<double> log_weights,
                                                NeighborhoodPath path) {
  if (support.dimension() < 1 || support.dimension() > kMaxDimension) {
    throw InputError("posterior: unsupported dimension " + std::to_string(support.dimension()));
  }
  auto geometry = std::make_shared<Geometry>();
  geometry->support = support;
  geometry->candidates = lattice::enumerate_ball(support.center, support.radius);
  if (log_weights.size() != geometry->candidates.size()) {
    throw InputError("posterior: expected " + std::to_string(geometry->candidates.size()) +
                     " log-weights, got " + std::to_string(log_weights.size()));
  }
  const auto d = static_cast<std::size_t>(support.dimension());
  geometry->offsets.assign(d, std::vector<double>(geometry->candidates.size()));
  for (std::size_t j = 0; j < geometry->candidates.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      geometry->offsets[i][j] = static_cast<double>(geometry->candidates[j][i] - support.center[i]);
    }
  }

  PosteriorState state;
  state.geometry_ = std::move(geometry);
  state.path_ = path;
  state.log_weights_ = std::move(log_weights);
  state.refresh();
  return state;
}

void PosteriorState::absorb(const ObservationFrame& frame, const channels::ChannelPair& ch) {
  if (frame.time != time_ + 1) {
    throw SequencingError("posterior at time " + std::to_string(time_) +
                          " cannot absorb frame " + std::to_string(frame.time));
  }
  if (!frame.window || frame.values.size() != frame.window->size()) {
    throw InputError("frame values do not match its window");
  }
  const Window& window = *frame.window;
  if (window.dimension() != dimension()) throw InputError("frame dimension mismatch");
  const auto reach = lattice::l1_distance(window.center(), support().center) +
                     static_cast<lattice::Count>(support().radius + frame.time);
  if (reach > static_cast<lattice::Count>(window.radius())) {
    throw CoverageError("window radius " + std::to_string(window.radius()) +
                        " does not cover the support at time " + std::to_string(frame.time));
  }

  thread_local std::vector<double> llr, increments;
  llr.resize(frame.values.size());
  increments.resize(log_weights_.size());
  ch.llr(frame.values, llr);
  neighborhood_sums(frame, llr, increments);
  kernels::active().add_inplace(log_weights_.data(), increments.data(), increments.size());
  time_ = frame.time;
  refresh();
}

void PosteriorState::neighborhood_sums(const ObservationFrame& frame, std::span<const double> llr,
                                       std::span<double> out) const {
  const Window& window = *frame.window;
  const int t = frame.time;
  const auto& cands = candidates();
  if (path_ == NeighborhoodPath::kAccelerated && dimension() == 1) {
    sums_by_prefix_1d(window, cands, t, llr, out);
    return;
  }
  if (path_ == NeighborhoodPath::kAccelerated && dimension() == 2) {
    sums_by_rotated_prefix_2d(window, cands, t, llr, out);
    return;
  }
  const auto& k = kernels::active();
  for (std::size_t j = 0; j < cands.size(); ++j) {
    double total = 0.0;
    window.for_each_run(cands[j], t, [&](std::size_t first, std::size_t len) {
      total += k.sum(llr.data() + first, len);
    });
    out[j] = total;
  }
}

void PosteriorState::refresh() {
  const auto& k = kernels::active();
  const std::size_t n = log_weights_.size();
  const double top = k.max(log_weights_.data(), n);

  thread_local std::vector<double> w;
  w.resize(n);
  std::size_t best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = std::exp(log_weights_[j] - top);
    if (log_weights_[j] > log_weights_[best]) best = j;
  }
  const double total = k.sum(w.data(), n);
  log_normalizer_ = top + std::log(total);
  map_index_ = best;

  const auto& offsets = geometry_->offsets;
  mean_offset_.assign(offsets.size(), 0.0);
  double spread = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    mean_offset_[i] = k.dot(w.data(), offsets[i].data(), n) / total;
    spread += k.centered_sq_dot(w.data(), offsets[i].data(), mean_offset_[i], n);
  }
  variance_ = std::max(0.0, spread / total);
}

std::vector<double> PosteriorState::probabilities() const {
  std::vector<double> p(log_weights_.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp(log_weights_[j] - log_normalizer_);
  return p;
}

std::vector<double> PosteriorState::mean() const {
  std::vector<double> m(mean_offset_.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = static_cast<double>(support().center[i]) + mean_offset_[i];
  }
  return m;
}

PosteriorState update(PosteriorState state, const ObservationFrame& frame,
                      const channels::ChannelPair& ch) {
  state.absorb(frame, ch);
  return state;
}

}  // namespace cascade
