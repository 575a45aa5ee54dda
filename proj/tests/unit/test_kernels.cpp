#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "cascade/kernels.hpp"

using namespace cascade::kernels;

namespace {

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Blocked order written out longhand.
double blocked_sum(const std::vector<double>& x) {
  double a[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  const std::size_t full = x.size() / 8 * 8;
  for (std::size_t i = 0; i < full; ++i) a[i % 8] += x[i];
  double s = ((a[0] + a[4]) + (a[1] + a[5])) + ((a[2] + a[6]) + (a[3] + a[7]));
  for (std::size_t i = full; i < x.size(); ++i) s += x[i];
  return s;
}

}  // namespace

TEST_CASE("scalar sum follows the documented blocked order") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 16u, 33u, 1000u}) {
    const auto x = random_vector(n, rng, 1e3);
    CHECK(bits(scalar().sum(x.data(), n)) == bits(blocked_sum(x)));
  }
}

TEST_CASE("scalar kernels agree with extended-precision references") {
  std::mt19937_64 rng(2);
  const std::size_t n = 777;
  const auto a = random_vector(n, rng, 1.0);
  const auto b = random_vector(n, rng, 1.0);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(b[i]);
  long double s = 0, d = 0, c = 0;
  double mx = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    s += a[i];
    d += static_cast<long double>(a[i]) * b[i];
    c += static_cast<long double>(w[i]) * (a[i] - 0.3) * (a[i] - 0.3);
    mx = std::max(mx, a[i]);
  }
  const auto& k = scalar();
  CHECK(k.sum(a.data(), n) == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
  CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
  CHECK(k.centered_sq_dot(w.data(), a.data(), 0.3, n) ==
        doctest::Approx(static_cast<double>(c)).epsilon(1e-12));
  CHECK(k.max(a.data(), n) == mx);

  std::vector<double> out(n), acc = a;
  k.affine(a.data(), 2.5, -1.0, out.data(), n);
  k.add_inplace(acc.data(), b.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(out[i] == a[i] * 2.5 + -1.0);
    CHECK(acc[i] == a[i] + b[i]);
  }
}

TEST_CASE("max handles -inf and empty input") {
  const double ninf = -std::numeric_limits<double>::infinity();
  for (const KernelTable* k : available()) {
    std::vector<double> x(13, ninf);
    CHECK(k->max(x.data(), x.size()) == ninf);
    x[11] = -5.0;
    CHECK(k->max(x.data(), x.size()) == -5.0);
    CHECK(k->max(x.data(), 0) == ninf);
    CHECK(k->sum(x.data(), 0) == 0.0);
  }
}

TEST_CASE("every SIMD table is bit-identical to scalar") {
  const auto tables = available();
  MESSAGE("kernel tables available: " << tables.size() << ", active: " << active().name);
  std::mt19937_64 rng(3);
  const auto& ref = scalar();
  for (const KernelTable* k : tables) {
    CAPTURE(k->name);
    for (std::size_t n = 0; n <= 70; ++n) {
      for (double scale : {1e-3, 1.0, 1e8}) {
        const auto a = random_vector(n, rng, scale);
        const auto b = random_vector(n, rng, scale);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(b[i]);
        CHECK(bits(k->sum(a.data(), n)) == bits(ref.sum(a.data(), n)));
        CHECK(bits(k->dot(a.data(), b.data(), n)) == bits(ref.dot(a.data(), b.data(), n)));
        CHECK(bits(k->centered_sq_dot(w.data(), a.data(), 0.7, n)) ==
              bits(ref.centered_sq_dot(w.data(), a.data(), 0.7, n)));
        CHECK(bits(k->max(a.data(), n)) == bits(ref.max(a.data(), n)));

        std::vector<double> o1(n), o2(n), acc1 = a, acc2 = a;
        k->affine(a.data(), 1.75, -0.5, o1.data(), n);
        ref.affine(a.data(), 1.75, -0.5, o2.data(), n);
        k->add_inplace(acc1.data(), b.data(), n);
        ref.add_inplace(acc2.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(bits(o1[i]) == bits(o2[i]));
          CHECK(bits(acc1[i]) == bits(acc2[i]));
        }
      }
    }
  }
}
