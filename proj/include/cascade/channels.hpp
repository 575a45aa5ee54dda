#pragma once

// Per-vertex signal model: Q0 before a vertex is reached by the cascade,
// Q1 after. Signals are stored as doubles; a discrete channel's symbols are
// the integers 0..m-1.

#include <random>
#include <span>
#include <string>
#include <vector>

namespace cascade::channels {

enum class ChannelKind { kGaussianShift, kDiscrete };

// Closed-form moments of the likelihood ratio L = dQ1/dQ0.
struct ChannelMoments {
  double alpha = 1.0;    // E_{Q1}[L]
  double lambda0 = 1.0;  // E_{Q0}[L^2]
  double lambda1 = 1.0;  // E_{Q1}[L^2]
  double kl01 = 0.0;     // D(Q0 || Q1)
  double kl10 = 0.0;     // D(Q1 || Q0)
  double d_mean = 0.0;   // (kl01 + kl10) / 2

  double lambda() const noexcept { return lambda0 * lambda1; }
};

class ChannelPair {
 public:
  // Q0 = N(0,1), Q1 = N(mu,1). mu must be > 0 unless test_mode, which
  // also admits mu = 0 (identical measures).
  static ChannelPair gaussian_shift(double mu, bool test_mode = false);

  // Finite alphabet. Entries must be in [0,1] and sum to 1 (within 1e-9);
  // zeros must coincide in q0 and q1. q0 == q1 requires test_mode.
  static ChannelPair discrete(std::vector<double> q0, std::vector<double> q1,
                              bool test_mode = false);

  ChannelKind kind() const noexcept { return kind_; }
  double mu() const noexcept { return mu_; }
  const std::vector<double>& q0() const noexcept { return q0_; }
  const std::vector<double>& q1() const noexcept { return q1_; }
  std::size_t alphabet_size() const noexcept { return q0_.size(); }
  bool identical() const noexcept { return identical_; }

  // log dQ1/dQ0 at y. Discrete symbols outside the alphabet (or with zero
  // probability) raise InputError.
  double llr(double y) const;

  // Elementwise llr over a frame; out.size() must equal y.size().
  void llr(std::span<const double> y, std::span<double> out) const;

  ChannelMoments moments() const;

  std::string describe() const;

 private:
  ChannelPair() = default;

  ChannelKind kind_ = ChannelKind::kGaussianShift;
  double mu_ = 0.0;
  std::vector<double> q0_, q1_;
  std::vector<double> log_ratio_;  // per symbol, discrete only
  bool identical_ = false;
};

// Draws signals for one channel pair. Holds the distribution objects so a
// frame's worth of draws does not rebuild them.
class SignalSampler {
 public:
  explicit SignalSampler(const ChannelPair& ch);

  double operator()(bool infected, std::mt19937_64& rng);

 private:
  const ChannelPair* ch_;
  std::normal_distribution<double> normal_;
  std::discrete_distribution<int> pre_, post_;
};

// One draw from Q1 if infected else Q0.
double sample(const ChannelPair& ch, bool infected, std::mt19937_64& rng);

}  // namespace cascade::channels
