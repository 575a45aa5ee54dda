#pragma once

// Geometry and combinatorics of the d-dimensional integer lattice under the
// L1 metric. Everything here is a pure function of its arguments.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cascade::lattice {

using Coord = std::int64_t;
using Count = std::uint64_t;

class Vertex {
 public:
  Vertex() = default;
  explicit Vertex(std::vector<Coord> coords) : coords_(std::move(coords)) {}
  Vertex(std::initializer_list<Coord> coords) : coords_(coords) {}

  static Vertex origin(int dimension) {
    return Vertex(std::vector<Coord>(static_cast<std::size_t>(dimension), 0));
  }

  int dimension() const noexcept { return static_cast<int>(coords_.size()); }
  Coord operator[](std::size_t i) const { return coords_[i]; }
  Coord& operator[](std::size_t i) { return coords_[i]; }
  std::span<const Coord> coords() const noexcept { return coords_; }

  // Lexicographic order on coordinates.
  auto operator<=>(const Vertex&) const = default;

  Vertex operator+(const Vertex& other) const;
  Vertex operator-(const Vertex& other) const;

  std::string to_string() const;

 private:
  std::vector<Coord> coords_;
};

// Uniform-prior support: the L1 ball of radius `radius` around `center`.
struct PriorSupport {
  Vertex center;
  int radius = 0;
  Count size = 1;

  static PriorSupport ball(Vertex center, int radius);

  int dimension() const noexcept { return center.dimension(); }
  bool contains(const Vertex& v) const;
};

// Throws InputError on dimension mismatch.
Count l1_distance(const Vertex& u, const Vertex& v);

// |∂N(t)|: lattice points at L1 distance exactly t from a vertex.
// Closed form sum_k 2^k C(d,k) C(t-1,k-1); 1 at t = 0.
Count sphere_size(int d, int t);

// |N(t)| = sum_{s<=t} sphere_size(d,s) = sum_k 2^k C(d,k) C(t,k).
Count ball_size(int d, int t);

// Neighborhood growth h(t) = sum_{s<=t} ball_size(d,s).
Count growth(int d, int t);

// Integer pseudo-inverse of growth: min{t >= 0 : h(t) >= z}.
int growth_inverse(int d, double z);

// Vertices with L1 distance <= t from center, lexicographic order.
std::vector<Vertex> enumerate_ball(const Vertex& center, int t);

// sum_{s<=t} |N_u(s) ∩ N_v(s)|.
Count overlap_growth(const Vertex& u, const Vertex& v, int t);

struct SphereBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Quadrant-counting bounds on sphere_size, valid for d >= 2 and t >= d.
// Throws InputError outside that range.
SphereBounds sphere_bounds(int d, int t);

// Sum of ||u||_2^p over the radius-r ball around the origin.
double pnorm_sum(int r, double p, int d);

// Binomial coefficient with overflow checking (throws std::overflow_error).
Count binomial(Count n, Count k);

}  // namespace cascade::lattice
