#include "cascade/channels.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cascade/errors.hpp"
#include "cascade/kernels.hpp"

namespace cascade::channels {

namespace {

void validate_distribution(const std::vector<double>& q, const char* name) {
  if (q.size() < 2) throw InputError(std::string(name) + ": alphabet needs at least 2 symbols");
  double total = 0.0;
  for (double p : q) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError(std::string(name) + ": probabilities must lie in [0,1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError(std::string(name) + ": probabilities must sum to 1");
  }
}

std::size_t symbol_index(double y, std::size_t m) {
  if (!(y >= 0.0) || y != std::floor(y) || y >= static_cast<double>(m)) {
    throw InputError("discrete signal " + std::to_string(y) + " is outside the alphabet");
  }
  return static_cast<std::size_t>(y);
}

}  // namespace

ChannelPair ChannelPair::gaussian_shift(double mu, bool test_mode) {
  if (!std::isfinite(mu) || mu < 0.0 || (mu == 0.0 && !test_mode)) {
    throw InputError("gaussian_shift: mu must be finite and > 0 (mu = 0 only in test mode)");
  }
  ChannelPair ch;
  ch.kind_ = ChannelKind::kGaussianShift;
  ch.mu_ = mu;
  ch.identical_ = mu == 0.0;
  return ch;
}

ChannelPair ChannelPair::discrete(std::vector<double> q0, std::vector<double> q1,
                                  bool test_mode) {
  validate_distribution(q0, "q0");
  validate_distribution(q1, "q1");
  if (q0.size() != q1.size()) throw InputError("q0 and q1 must have the same alphabet size");
  for (std::size_t i = 0; i < q0.size(); ++i) {
    if ((q0[i] > 0.0) != (q1[i] > 0.0)) {
      throw InputError("symbol " + std::to_string(i) +
                       " has zero probability under one measure only; Q0 and Q1 must be "
                       "mutually absolutely continuous");
    }
  }
  const bool same = q0 == q1;
  if (same && !test_mode) throw InputError("q0 == q1 is only permitted in test mode");

  ChannelPair ch;
  ch.kind_ = ChannelKind::kDiscrete;
  ch.identical_ = same;
  ch.log_ratio_.resize(q0.size());
  for (std::size_t i = 0; i < q0.size(); ++i) {
    ch.log_ratio_[i] = q0[i] > 0.0 ? std::log(q1[i] / q0[i]) : std::nan("");
  }
  ch.q0_ = std::move(q0);
  ch.q1_ = std::move(q1);
  return ch;
}

double ChannelPair::llr(double y) const {
  if (kind_ == ChannelKind::kGaussianShift) return y * mu_ + (-0.5 * mu_ * mu_);
  const double value = log_ratio_[symbol_index(y, q0_.size())];
  if (std::isnan(value)) throw InputError("discrete signal has zero probability");
  return value;
}

void ChannelPair::llr(std::span<const double> y, std::span<double> out) const {
  if (y.size() != out.size()) throw InputError("llr: output size mismatch");
  if (kind_ == ChannelKind::kGaussianShift) {
    kernels::active().affine(y.data(), mu_, -0.5 * mu_ * mu_, out.data(), y.size());
    return;
  }
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = llr(y[i]);
}

ChannelMoments ChannelPair::moments() const {
  ChannelMoments m;
  if (kind_ == ChannelKind::kGaussianShift) {
    const double mu2 = mu_ * mu_;
    m.alpha = std::exp(mu2);
    m.lambda0 = m.alpha;
    m.lambda1 = std::exp(3.0 * mu2);
    m.kl01 = 0.5 * mu2;
    m.kl10 = 0.5 * mu2;
  } else {
    m.alpha = m.lambda0 = m.lambda1 = m.kl01 = m.kl10 = 0.0;
    for (std::size_t i = 0; i < q0_.size(); ++i) {
      if (q0_[i] == 0.0) continue;
      const double ratio = q1_[i] / q0_[i];
      m.alpha += q1_[i] * ratio;
      m.lambda0 += q0_[i] * ratio * ratio;
      m.lambda1 += q1_[i] * ratio * ratio;
      m.kl01 -= q0_[i] * log_ratio_[i];
      m.kl10 += q1_[i] * log_ratio_[i];
    }
  }
  m.d_mean = 0.5 * (m.kl01 + m.kl10);
  return m;
}

std::string ChannelPair::describe() const {
  std::ostringstream os;
  if (kind_ == ChannelKind::kGaussianShift) {
    os << "gaussian_shift(mu=" << mu_ << ")";
  } else {
    os << "discrete(q0=[";
    for (std::size_t i = 0; i < q0_.size(); ++i) os << (i ? "," : "") << q0_[i];
    os << "], q1=[";
    for (std::size_t i = 0; i < q1_.size(); ++i) os << (i ? "," : "") << q1_[i];
    os << "])";
  }
  return os.str();
}

SignalSampler::SignalSampler(const ChannelPair& ch) : ch_(&ch) {
  if (ch.kind() == ChannelKind::kDiscrete) {
    pre_ = std::discrete_distribution<int>(ch.q0().begin(), ch.q0().end());
    post_ = std::discrete_distribution<int>(ch.q1().begin(), ch.q1().end());
  }
}

double SignalSampler::operator()(bool infected, std::mt19937_64& rng) {
  if (ch_->kind() == ChannelKind::kGaussianShift) {
    const double z = normal_(rng);
    return infected ? z + ch_->mu() : z;
  }
  return static_cast<double>(infected ? post_(rng) : pre_(rng));
}

double sample(const ChannelPair& ch, bool infected, std::mt19937_64& rng) {
  SignalSampler sampler(ch);
  return sampler(infected, rng);
}

}  // namespace cascade::channels
