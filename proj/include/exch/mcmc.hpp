#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "exch/rng.hpp"

namespace exch {

using LogDensity = std::function<double(std::span<const double>)>;

struct MetropolisConfig {
  /// Total sweeps, burn-in included.
  std::int64_t iterations = 50'000;
  std::int64_t burn_in = 5'000;
  std::int64_t thinning = 1;
  /// One entry per coordinate, or a single entry used for all of them.
  /// Empty means 2.4 everywhere.
  std::vector<double> step_sizes;
};

/// Retained draws, one row per kept sweep.
struct PosteriorDraws {
  std::size_t dim = 0;
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major, rows() x dim
  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
  double acceptance_rate = 0.0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;

  std::size_t rows() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  double at(std::size_t row, std::size_t col) const { return values[row * dim + col]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
  std::vector<double> column(std::size_t col) const;
};

/*!
 * Random-walk Metropolis with a systematic coordinate scan.
 *
 * Each sweep visits coordinates in order; coordinate j gets a proposal
 * theta_j + step_j * N(0,1) (one polar normal) accepted with probability
 * min(1, exp(log_target' - log_target)), always consuming one open uniform.
 * Proposals with a non-finite target are rejected. The acceptance rate counts
 * every coordinate proposal, burn-in included.
 */
PosteriorDraws metropolis_sample(const LogDensity& log_target, std::vector<double> init,
                                 const MetropolisConfig& config, RngState& rng);

/// Independent chains on rng_split(rng, c), each with its own burn-in,
/// concatenated in chain order. `rng` is not advanced.
PosteriorDraws metropolis_sample_chains(const LogDensity& log_target, const std::vector<double>& init,
                                        const MetropolisConfig& config, const RngState& rng, int chains,
                                        int threads = 1);

}  // namespace exch
