#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "cascade/cascade_sim.hpp"
#include "cascade/errors.hpp"
#include "cascade/posterior.hpp"
#include "cascade/random.hpp"
#include "oracles.hpp"

using namespace cascade;
using lattice::Vertex;

namespace {

struct Run {
  std::vector<std::vector<double>> frames;
  std::vector<PosteriorState> states;  // after each frame
};

Run simulate(const lattice::PriorSupport& support, const Vertex& source, int t_max,
             const channels::ChannelPair& ch, NeighborhoodPath path, std::uint64_t key) {
  auto win = std::make_shared<const Window>(support.center, support.radius + t_max);
  WorldState world(source, win);
  RandomStream rs(key);
  PosteriorState post = PosteriorState::uniform(support, path);
  Run run;
  for (int t = 0; t <= t_max; ++t) {
    const auto frame = world.next_frame(ch, rs.engine());
    post.absorb(frame, ch);
    run.frames.push_back(frame.values);
    run.states.push_back(post);
  }
  return run;
}

std::vector<oracle::Point> points(const std::vector<Vertex>& vs) {
  std::vector<oracle::Point> out;
  for (const auto& v : vs) out.push_back(oracle::point_of(v));
  return out;
}

}  // namespace

TEST_CASE("incremental log-weights equal batch recomputation") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    const int k = std::uniform_int_distribution<int>(0, d == 1 ? 10 : 6)(rng);
    const int t_max = std::uniform_int_distribution<int>(0, d == 1 ? 8 : 5)(rng);
    const double mu = std::uniform_real_distribution<double>(0.3, 2.0)(rng);
    const auto ch = trial % 5 == 4 ? channels::ChannelPair::discrete({0.6, 0.3, 0.1}, {0.2, 0.3, 0.5})
                                   : channels::ChannelPair::gaussian_shift(mu);
    const Vertex center = d == 1 ? Vertex{trial % 7 - 3} : Vertex{trial % 3, -(trial % 4)};
    const auto support = lattice::PriorSupport::ball(center, k);
    const auto cands = PosteriorState::uniform(support).candidates();
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    const Vertex source = cands[pick(rng)];
    const auto path = trial % 3 == 0 ? NeighborhoodPath::kDirect : NeighborhoodPath::kAccelerated;

    const Run run = simulate(support, source, t_max, ch, path, rng());
    const Window win(support.center, support.radius + t_max);
    const auto cand_pts = points(cands);
    const auto win_pts = points(win.vertices());
    for (int t = 0; t <= t_max; ++t) {
      std::vector<std::vector<double>> prefix(run.frames.begin(), run.frames.begin() + t + 1);
      const auto want = oracle::batch_log_weights(cand_pts, win_pts, prefix, ch);
      const auto got = run.states[t].log_weights();
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9);
      const auto p = run.states[t].probabilities();
      long double total = 0;
      for (double x : p) total += x;
      CHECK(std::abs(static_cast<double>(total) - 1.0) <= 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("mean, variance and normalizer match the weights") {
  const auto support = lattice::PriorSupport::ball(Vertex{2, -1}, 5);
  const auto ch = channels::ChannelPair::gaussian_shift(0.8);
  const Run run = simulate(support, Vertex{3, 1}, 4, ch, NeighborhoodPath::kDirect, 17);
  for (const auto& st : run.states) {
    const auto p = st.probabilities();
    std::vector<double> mean(2, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      for (int i = 0; i < 2; ++i) mean[i] += p[j] * st.candidates()[j][i];
    }
    double var = 0.0, z = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      for (int i = 0; i < 2; ++i) var += p[j] * std::pow(st.candidates()[j][i] - mean[i], 2);
      z += std::exp(st.log_weights()[j]);
    }
    const auto m = st.mean();
    CHECK(m[0] == doctest::Approx(mean[0]).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(mean[1]).epsilon(1e-12));
    CHECK(st.variance() == doctest::Approx(var).epsilon(1e-10));
    CHECK(st.log_normalizer() == doctest::Approx(std::log(z)).epsilon(1e-12));
  }
}

TEST_CASE("direct and accelerated paths agree") {
  for (int d = 1; d <= 3; ++d) {
    const auto support = lattice::PriorSupport::ball(Vertex::origin(d), d == 3 ? 3 : 8);
    const auto ch = channels::ChannelPair::gaussian_shift(0.7);
    const Vertex src = d == 1 ? Vertex{-4} : d == 2 ? Vertex{2, 3} : Vertex{1, 0, -1};
    const Run a = simulate(support, src, 6, ch, NeighborhoodPath::kDirect, 99);
    const Run b = simulate(support, src, 6, ch, NeighborhoodPath::kAccelerated, 99);
    for (std::size_t t = 0; t < a.states.size(); ++t) {
      const auto wa = a.states[t].log_weights();
      const auto wb = b.states[t].log_weights();
      for (std::size_t i = 0; i < wa.size(); ++i) CHECK(std::abs(wa[i] - wb[i]) <= 1e-9);
    }
  }
}

TEST_CASE("translation equivariance") {
  const auto ch = channels::ChannelPair::gaussian_shift(1.0);
  for (auto path : {NeighborhoodPath::kDirect, NeighborhoodPath::kAccelerated}) {
    const auto s0 = lattice::PriorSupport::ball(Vertex{0, 0}, 6);
    const auto s1 = lattice::PriorSupport::ball(Vertex{40, -17}, 6);
    const Run a = simulate(s0, Vertex{1, -2}, 5, ch, path, 5);
    const Run b = simulate(s1, Vertex{41, -19}, 5, ch, path, 5);
    for (std::size_t t = 0; t < a.states.size(); ++t) {
      CHECK(a.states[t].mean_offset() == b.states[t].mean_offset());
      CHECK(a.states[t].variance() == b.states[t].variance());
      const auto ma = a.states[t].mean(), mb = b.states[t].mean();
      CHECK(mb[0] - ma[0] == doctest::Approx(40.0));
      CHECK(mb[1] - ma[1] == doctest::Approx(-17.0));
    }
  }
}

TEST_CASE("uninformative channel leaves the prior unchanged") {
  const auto support = lattice::PriorSupport::ball(Vertex{0, 0}, 4);
  const auto prior = PosteriorState::uniform(support);
  const auto ch = channels::ChannelPair::gaussian_shift(0.0, true);
  const Run run = simulate(support, Vertex{1, 1}, 5, ch, NeighborhoodPath::kDirect, 3);
  for (const auto& st : run.states) {
    CHECK(st.variance() == prior.variance());
    CHECK(st.log_normalizer() == doctest::Approx(std::log(double(support.size))).epsilon(1e-15));
  }
  // prior variance of the uniform L1 ball: sum of squared norms over n
  CHECK(prior.variance() ==
        doctest::Approx(lattice::pnorm_sum(4, 2.0, 2) / double(support.size)));
}

TEST_CASE("point-mass prior has zero variance") {
  const auto prior = PosteriorState::uniform(lattice::PriorSupport::ball(Vertex{3, 3}, 0));
  CHECK(prior.variance() == 0.0);
  CHECK(prior.map_estimate() == Vertex{3, 3});
}

TEST_CASE("MAP ties go to the lexicographically first vertex") {
  const auto support = lattice::PriorSupport::ball(Vertex{0, 0}, 1);
  std::vector<double> lw(support.size, 0.0);
  lw[1] = 2.0;
  lw[3] = 2.0;
  const auto st = PosteriorState::from_log_weights(support, lw);
  CHECK(st.map_estimate() == st.candidates()[1]);
  CHECK(PosteriorState::uniform(support).map_estimate() == Vertex{-1, 0});
}

TEST_CASE("extreme log-weights stay finite") {
  const auto support = lattice::PriorSupport::ball(Vertex{0}, 3);
  std::vector<double> lw(support.size, -1e6);
  lw[2] = 1e6;
  const auto st = PosteriorState::from_log_weights(support, lw);
  CHECK(st.variance() == 0.0);
  CHECK(st.mean()[0] == -1.0);
  CHECK(std::isfinite(st.log_normalizer()));
}

TEST_CASE("absorb rejects out-of-order and uncovered frames") {
  const auto support = lattice::PriorSupport::ball(Vertex{0}, 5);
  const auto ch = channels::ChannelPair::gaussian_shift(1.0);
  auto win = std::make_shared<const Window>(Vertex{0}, 7);
  WorldState world(Vertex{0}, win);
  RandomStream rs(1);
  PosteriorState post = PosteriorState::uniform(support);
  auto f0 = world.next_frame(ch, rs.engine());
  auto f1 = world.next_frame(ch, rs.engine());
  CHECK_THROWS_AS(post.absorb(f1, ch), SequencingError);
  post.absorb(f0, ch);
  CHECK_THROWS_AS(post.absorb(f0, ch), SequencingError);
  post.absorb(f1, ch);
  auto f2 = world.next_frame(ch, rs.engine());
  post.absorb(f2, ch);
  auto f3 = world.next_frame(ch, rs.engine());  // needs radius 5 + 3 > 7
  CHECK_THROWS_AS(post.absorb(f3, ch), CoverageError);

  const PosteriorState fresh = PosteriorState::uniform(support);
  const auto next = update(fresh, f0, ch);
  CHECK(next.time() == 0);
  CHECK(fresh.time() == -1);
  CHECK_THROWS_AS(PosteriorState::from_log_weights(support, {0.0, 1.0}), InputError);
}
