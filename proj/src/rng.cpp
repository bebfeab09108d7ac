#include "exch/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "exch/error.hpp"

namespace exch {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be finite");
  }
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t RngState::next_u64() noexcept {
  const std::uint64_t block = position_ >> 1;
  if (block != cached_block_) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream_index_),
        static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed_),
                                              static_cast<std::uint32_t>(master_seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    cache_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    cache_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    cached_block_ = block;
  }
  return cache_[position_++ & 1];
}

double RngState::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

RngState RngState::split(std::uint64_t index) const noexcept {
  // base + (index + 1) * golden is injective in index because golden is odd.
  const std::uint64_t base = splitmix_finalize(stream_index_ ^ kGolden);
  return RngState(master_seed_, splitmix_finalize(base + (index + 1) * kGolden));
}

double sample_normal(RngState& rng, double mu, double sigma) {
  require_finite(mu, "mu");
  require_finite(sigma, "sigma");
  if (sigma < 0.0) throw Error(ErrorCode::InvalidParameter, "sigma must be >= 0");
  if (sigma == 0.0) return mu;
  for (;;) {
    const double v1 = 2.0 * rng.uniform() - 1.0;
    const double v2 = 2.0 * rng.uniform() - 1.0;
    const double s = v1 * v1 + v2 * v2;
    if (s > 0.0 && s < 1.0) {
      return mu + sigma * v1 * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

std::int64_t sample_poisson(RngState& rng, double lambda) {
  require_finite(lambda, "lambda");
  if (lambda < 0.0) throw Error(ErrorCode::InvalidParameter, "lambda must be >= 0");
  if (lambda == 0.0) return 0;

  if (lambda <= 30.0) {
    const double limit = std::exp(-lambda);
    double prod = rng.uniform();
    std::int64_t k = 0;
    while (prod > limit) {
      prod *= rng.uniform();
      ++k;
    }
    return k;
  }

  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

int sample_bernoulli(RngState& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "p must lie in [0, 1]");
  }
  return rng.uniform() < p ? 1 : 0;
}

double sample_gamma(RngState& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::InvalidParameter, "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0);
    return g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_normal(rng, 0.0, 1.0);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(RngState& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidParameter, "beta parameters must be positive and finite");
  }
  const double x = sample_gamma(rng, a);
  const double y = sample_gamma(rng, b);
  double r = x / (x + y);
  if (!(r > 0.0)) r = std::numeric_limits<double>::min();
  if (!(r < 1.0)) r = std::nextafter(1.0, 0.0);
  return r;
}

double expit(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace exch
