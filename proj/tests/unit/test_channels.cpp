#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cascade/channels.hpp"
#include "cascade/errors.hpp"
#include "oracles.hpp"

using namespace cascade::channels;

namespace {

void check_moments(const ChannelMoments& got, const oracle::Moments& want) {
  CHECK(got.alpha == doctest::Approx(want.alpha).epsilon(1e-6));
  CHECK(got.lambda0 == doctest::Approx(want.lambda0).epsilon(1e-6));
  CHECK(got.lambda1 == doctest::Approx(want.lambda1).epsilon(1e-6));
  CHECK(got.kl01 == doctest::Approx(want.kl01).epsilon(1e-6));
  CHECK(got.kl10 == doctest::Approx(want.kl10).epsilon(1e-6));
  CHECK(got.d_mean == doctest::Approx(0.5 * (want.kl01 + want.kl10)).epsilon(1e-6));
}

}  // namespace

TEST_CASE("gaussian moments against quadrature") {
  for (double mu : {0.5, 1.0, 2.0}) {
    CAPTURE(mu);
    check_moments(ChannelPair::gaussian_shift(mu).moments(),
                  oracle::gaussian_moments_by_quadrature(mu));
  }
  CHECK(ChannelPair::gaussian_shift(1.0).moments().alpha == doctest::Approx(2.718281828));
}

TEST_CASE("discrete moments against direct summation") {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{0.7, 0.3}, {0.2, 0.8}},
      {{0.5, 0.3, 0.2}, {0.1, 0.3, 0.6}},
      {{0.25, 0.0, 0.25, 0.5}, {0.4, 0.0, 0.4, 0.2}},
  };
  for (const auto& [q0, q1] : cases) {
    check_moments(ChannelPair::discrete(q0, q1).moments(),
                  oracle::discrete_moments_by_summation(q0, q1));
  }
}

TEST_CASE("llr values and batch form") {
  const auto g = ChannelPair::gaussian_shift(1.5);
  for (double y : {-2.0, 0.0, 0.75, 3.0}) {
    CHECK(g.llr(y) == doctest::Approx(std::log(oracle::normal_pdf(y, 1.5) /
                                               oracle::normal_pdf(y, 0.0))));
  }
  const auto d = ChannelPair::discrete({0.5, 0.5}, {0.25, 0.75});
  CHECK(d.llr(0) == doctest::Approx(std::log(0.5)));
  CHECK(d.llr(1) == doctest::Approx(std::log(1.5)));
  CHECK_THROWS_AS(d.llr(2), cascade::InputError);
  CHECK_THROWS_AS(d.llr(0.5), cascade::InputError);

  const std::vector<double> ys{-1.0, 0.0, 2.0, 0.25, 1.0, -3.0, 4.0, 0.1, 0.2};
  std::vector<double> out(ys.size());
  g.llr(ys, out);
  for (std::size_t i = 0; i < ys.size(); ++i) CHECK(out[i] == g.llr(ys[i]));
}

TEST_CASE("channel validation") {
  CHECK_THROWS_AS(ChannelPair::gaussian_shift(0.0), cascade::InputError);
  CHECK_THROWS_AS(ChannelPair::gaussian_shift(-1.0), cascade::InputError);
  CHECK_NOTHROW(ChannelPair::gaussian_shift(0.0, true));
  CHECK(ChannelPair::gaussian_shift(0.0, true).identical());
  // zero opposite a positive probability breaks absolute continuity
  CHECK_THROWS_AS(ChannelPair::discrete({0.5, 0.5}, {1.0, 0.0}), cascade::InputError);
  CHECK_THROWS_AS(ChannelPair::discrete({0.5, 0.6}, {0.5, 0.5}), cascade::InputError);
  CHECK_THROWS_AS(ChannelPair::discrete({1.0}, {1.0}), cascade::InputError);
  CHECK_THROWS_AS(ChannelPair::discrete({0.5, 0.5}, {0.5, 0.5}), cascade::InputError);
  const auto same = ChannelPair::discrete({0.5, 0.5}, {0.5, 0.5}, true);
  CHECK(same.identical());
  const auto m = same.moments();
  CHECK(m.alpha == 1.0);
  CHECK(m.lambda() == 1.0);
  CHECK(m.kl01 == 0.0);
}

TEST_CASE("sampler reproduces the channel laws") {
  std::mt19937_64 rng(11);
  const auto g = ChannelPair::gaussian_shift(2.0);
  const int n = 200000;
  double s0 = 0, s1 = 0;
  for (int i = 0; i < n; ++i) {
    s0 += sample(g, false, rng);
    s1 += sample(g, true, rng);
  }
  CHECK(std::abs(s0 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s1 / n - 2.0) < 5.0 / std::sqrt(n));

  const auto d = ChannelPair::discrete({0.2, 0.8}, {0.9, 0.1});
  SignalSampler sampler(d);
  int ones0 = 0, ones1 = 0;
  for (int i = 0; i < n; ++i) {
    ones0 += sampler(false, rng) == 1.0;
    ones1 += sampler(true, rng) == 1.0;
  }
  CHECK(std::abs(ones0 / double(n) - 0.8) < 5.0 * std::sqrt(0.16 / n));
  CHECK(std::abs(ones1 / double(n) - 0.1) < 5.0 * std::sqrt(0.09 / n));

  // E_{Q1}[L] = alpha, checked by Monte Carlo
  double lr = 0;
  const auto g1 = ChannelPair::gaussian_shift(0.5);
  for (int i = 0; i < n; ++i) lr += std::exp(g1.llr(sample(g1, true, rng)));
  CHECK(lr / n == doctest::Approx(g1.moments().alpha).epsilon(0.01));
}
