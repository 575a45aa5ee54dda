#include "cascade/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "cascade/errors.hpp"

namespace cascade::lattice {

namespace {

Count checked_mul(Count a, Count b) {
  Count out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("lattice count overflows 64 bits");
  }
  return out;
}

Count checked_add(Count a, Count b) {
  Count out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("lattice count overflows 64 bits");
  }
  return out;
}

void require_dims(int d, int t) {
  if (d < 1) throw InputError("lattice dimension must be >= 1");
  if (t < 0) throw InputError("radius must be >= 0");
}

// sum_k 2^k C(d,k) C(m, k + shift), the common shape of the sphere, ball
// and growth closed forms.
Count signed_composition_sum(int d, Count m, int shift, int k_min) {
  Count total = 0;
  Count pow2 = k_min == 0 ? 1 : 2;
  for (int k = k_min; k <= d; ++k) {
    const Count choose_m = binomial(m, static_cast<Count>(k + shift));
    if (choose_m == 0) break;
    total = checked_add(total, checked_mul(checked_mul(pow2, binomial(d, k)), choose_m));
    pow2 = checked_mul(pow2, 2);
  }
  return total;
}

void enumerate_into(const Vertex& center, std::size_t axis, Coord remaining,
                    std::vector<Coord>& scratch, std::vector<Vertex>& out) {
  const Coord c = center[axis];
  const bool last = axis + 1 == scratch.size();
  for (Coord x = c - remaining; x <= c + remaining; ++x) {
    scratch[axis] = x;
    const Coord rest = remaining - (x > c ? x - c : c - x);
    if (last) {
      out.emplace_back(scratch);
    } else {
      enumerate_into(center, axis + 1, rest, scratch, out);
    }
  }
}

}  // namespace

Vertex Vertex::operator+(const Vertex& other) const {
  if (dimension() != other.dimension()) throw InputError("vertex dimension mismatch");
  Vertex out = *this;
  for (std::size_t i = 0; i < coords_.size(); ++i) out.coords_[i] += other.coords_[i];
  return out;
}

Vertex Vertex::operator-(const Vertex& other) const {
  if (dimension() != other.dimension()) throw InputError("vertex dimension mismatch");
  Vertex out = *this;
  for (std::size_t i = 0; i < coords_.size(); ++i) out.coords_[i] -= other.coords_[i];
  return out;
}

std::string Vertex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coords_[i]);
  }
  return s + ")";
}

PriorSupport PriorSupport::ball(Vertex center, int radius) {
  const int d = center.dimension();
  require_dims(d, radius);
  PriorSupport s;
  s.size = ball_size(d, radius);
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

bool PriorSupport::contains(const Vertex& v) const {
  return l1_distance(center, v) <= static_cast<Count>(radius);
}

Count binomial(Count n, Count k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Count result = 1;
  for (Count i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; divide first by the
    // gcd to stay inside 64 bits for as long as possible.
    const Count num = n - k + i;
    const Count g = std::gcd(result, i);
    result = checked_mul(result / g, num / (i / g));
  }
  return result;
}

Count l1_distance(const Vertex& u, const Vertex& v) {
  if (u.dimension() != v.dimension()) {
    throw InputError("l1_distance: dimension mismatch (" + std::to_string(u.dimension()) +
                     " vs " + std::to_string(v.dimension()) + ")");
  }
  Count total = 0;
  for (int i = 0; i < u.dimension(); ++i) {
    const Coord diff = u[i] - v[i];
    total += static_cast<Count>(diff < 0 ? -diff : diff);
  }
  return total;
}

Count sphere_size(int d, int t) {
  require_dims(d, t);
  if (t == 0) return 1;
  return signed_composition_sum(d, static_cast<Count>(t - 1), -1, 1);
}

Count ball_size(int d, int t) {
  require_dims(d, t);
  return signed_composition_sum(d, static_cast<Count>(t), 0, 0);
}

Count growth(int d, int t) {
  require_dims(d, t);
  // hockey stick: sum_{s<=t} C(s,k) = C(t+1,k+1)
  return signed_composition_sum(d, static_cast<Count>(t) + 1, 1, 0);
}

int growth_inverse(int d, double z) {
  require_dims(d, 0);
  if (std::isnan(z)) throw InputError("growth_inverse: z is NaN");
  if (z <= 1.0) return 0;
  auto reaches = [&](int t) { return static_cast<double>(growth(d, t)) >= z; };
  int hi = 1;
  while (!reaches(hi)) hi *= 2;
  int lo = hi / 2;  // h(lo) < z
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (reaches(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<Vertex> enumerate_ball(const Vertex& center, int t) {
  require_dims(center.dimension(), t);
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(ball_size(center.dimension(), t)));
  std::vector<Coord> scratch(static_cast<std::size_t>(center.dimension()));
  enumerate_into(center, 0, t, scratch, out);
  return out;
}

Count overlap_growth(const Vertex& u, const Vertex& v, int t) {
  require_dims(u.dimension(), t);
  if (l1_distance(u, v) > 2 * static_cast<Count>(t)) return 0;
  // w is in N_u(s) ∩ N_v(s) for every s in [max(d(w,u), d(w,v)), t].
  Count total = 0;
  for (const Vertex& w : enumerate_ball(u, t)) {
    const Count reach = std::max(l1_distance(w, u), l1_distance(w, v));
    if (reach <= static_cast<Count>(t)) total += static_cast<Count>(t) - reach + 1;
  }
  return total;
}

SphereBounds sphere_bounds(int d, int t) {
  if (d < 2 || t < d) {
    throw InputError("sphere_bounds requires d >= 2 and t >= d (got d=" + std::to_string(d) +
                     ", t=" + std::to_string(t) + ")");
  }
  const double k = d - 1;
  const double scale = std::pow(2.0, d) / std::pow(k, k);
  return {scale * std::pow(t - 1.0, k),
          scale * std::pow(std::numbers::e, k) * std::pow(t + k, k)};
}

double pnorm_sum(int r, double p, int d) {
  require_dims(d, r);
  if (!(p >= 1.0)) throw InputError("pnorm_sum requires p >= 1");
  // Walk the nonnegative orthant; a point with m nonzero coordinates stands
  // for 2^m sign-flipped copies.
  double total = 0.0;
  auto visit = [&](auto&& self, int axis, Coord remaining, double sq, int nonzero) -> void {
    if (axis == d) {
      if (sq > 0.0) total += std::ldexp(std::pow(sq, p / 2.0), nonzero);
      return;
    }
    for (Coord v = 0; v <= remaining; ++v) {
      self(self, axis + 1, remaining - v, sq + static_cast<double>(v * v), nonzero + (v != 0));
    }
  };
  visit(visit, 0, r, 0.0, 0);
  return total;
}

}  // namespace cascade::lattice
