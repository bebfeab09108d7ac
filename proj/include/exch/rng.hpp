#pragma once

#include <array>
#include <cstdint>

namespace exch {

/// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for the
/// known-answer test; callers normally go through RngState.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/*!
 * Counter-based random stream.
 *
 * The 128-bit Philox counter is split into (draw block, stream index) and the
 * 64-bit key is the master seed, so two streams with different indices walk
 * disjoint counter ranges and can never overlap. A state is a plain value:
 * copying it forks an identical sequence.
 */
class RngState {
 public:
  explicit RngState(std::uint64_t master_seed, std::uint64_t stream_index = 0) noexcept
      : master_seed_(master_seed), stream_index_(stream_index) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }
  /// Number of 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1); never returns an endpoint.
  double uniform_open() noexcept;

  /// Child stream for `index`. The parent is not advanced. Distinct indices
  /// from the same parent always give distinct stream indices.
  RngState split(std::uint64_t index) const noexcept;

  friend bool operator==(const RngState& a, const RngState& b) noexcept {
    return a.master_seed_ == b.master_seed_ && a.stream_index_ == b.stream_index_ &&
           a.position_ == b.position_;
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t position_ = 0;
  // Cached Philox output for block `cached_block_`.
  std::array<std::uint64_t, 2> cache_{};
  std::uint64_t cached_block_ = ~std::uint64_t{0};
};

inline RngState rng_new(std::uint64_t master_seed) noexcept { return RngState(master_seed); }

inline RngState rng_split(const RngState& rng, std::uint64_t index) noexcept {
  return rng.split(index);
}

// Samplers. Each documents how many uniforms it consumes so that independent
// implementations reproduce the same streams.

/// Marsaglia polar method. Consumes pairs of uniforms until a pair lands
/// strictly inside the unit disc; returns the first coordinate's variate and
/// discards the second. sigma == 0 returns mu without consuming anything.
double sample_normal(RngState& rng, double mu, double sigma);

/// Knuth multiplication for lambda <= 30 (consumes k+1 uniforms for result
/// k), PTRS transformed rejection (Hormann 1993) above, two uniforms per
/// trial. lambda == 0 returns 0 without consuming.
std::int64_t sample_poisson(RngState& rng, double lambda);

/// One uniform; returns 1 iff u < p. p == 0 and p == 1 still consume.
int sample_bernoulli(RngState& rng, double p);

/// Marsaglia-Tsang squeeze; shape < 1 uses the boost Gamma(shape+1) * U^(1/shape),
/// drawing the gamma variate first and then one uniform.
double sample_gamma(RngState& rng, double shape);

/// X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b), X drawn first. Result is
/// clamped into the open interval (0, 1).
double sample_beta(RngState& rng, double a, double b);

/// Logistic function, evaluated without overflow for any finite x.
double expit(double x) noexcept;

}  // namespace exch
