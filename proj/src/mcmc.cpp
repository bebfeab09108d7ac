#include "exch/mcmc.hpp"

#include <cmath>

#include "exch/error.hpp"
#include "exch/parallel.hpp"

namespace exch {

std::vector<double> PosteriorDraws::column(std::size_t col) const {
  std::vector<double> out;
  out.reserve(rows());
  for (std::size_t r = 0; r < rows(); ++r) out.push_back(at(r, col));
  return out;
}

namespace {

std::vector<double> resolve_steps(const MetropolisConfig& config, std::size_t dim) {
  std::vector<double> steps;
  if (config.step_sizes.empty()) {
    steps.assign(dim, 2.4);
  } else if (config.step_sizes.size() == 1) {
    steps.assign(dim, config.step_sizes.front());
  } else if (config.step_sizes.size() == dim) {
    steps = config.step_sizes;
  } else {
    throw Error(ErrorCode::InvalidParameter, "step_sizes must have 1 or " + std::to_string(dim) + " entries");
  }
  for (double s : steps) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::DegenerateStep, "step sizes must be positive and finite");
    }
  }
  return steps;
}

void check_config(const MetropolisConfig& config) {
  if (config.burn_in < 0 || config.iterations <= config.burn_in) {
    throw Error(ErrorCode::InvalidParameter, "iterations must exceed burn_in");
  }
  if (config.thinning < 1) throw Error(ErrorCode::InvalidParameter, "thinning must be >= 1");
}

}  // namespace

PosteriorDraws metropolis_sample(const LogDensity& log_target, std::vector<double> init,
                                 const MetropolisConfig& config, RngState& rng) {
  check_config(config);
  if (init.empty()) throw Error(ErrorCode::InvalidParameter, "empty parameter vector");
  const std::size_t dim = init.size();
  const std::vector<double> steps = resolve_steps(config, dim);

  double current = log_target(init);
  if (!std::isfinite(current)) {
    throw Error(ErrorCode::NonFiniteTarget, "log target is not finite at the initial point");
  }

  PosteriorDraws out;
  out.dim = dim;
  out.burn_in = config.burn_in;
  out.thinning = config.thinning;
  out.values.reserve(static_cast<std::size_t>((config.iterations - config.burn_in) / config.thinning + 1) * dim);

  std::vector<double> theta = std::move(init);
  for (std::int64_t it = 0; it < config.iterations; ++it) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double old = theta[j];
      theta[j] = old + sample_normal(rng, 0.0, steps[j]);
      const double proposed = log_target(theta);
      const double u = rng.uniform_open();
      ++out.proposed;
      if (std::isfinite(proposed) && std::log(u) < proposed - current) {
        current = proposed;
        ++out.accepted;
      } else {
        theta[j] = old;
      }
    }
    if (it >= config.burn_in && (it - config.burn_in) % config.thinning == 0) {
      out.values.insert(out.values.end(), theta.begin(), theta.end());
    }
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(out.proposed);
  return out;
}

PosteriorDraws metropolis_sample_chains(const LogDensity& log_target, const std::vector<double>& init,
                                        const MetropolisConfig& config, const RngState& rng, int chains,
                                        int threads) {
  if (chains < 1) throw Error(ErrorCode::InvalidParameter, "chains must be >= 1");
  auto parts = parallel_map(chains, threads, [&](std::int64_t c) {
    RngState stream = rng_split(rng, static_cast<std::uint64_t>(c));
    return metropolis_sample(log_target, init, config, stream);
  });
  PosteriorDraws out = std::move(parts.front());
  for (std::size_t c = 1; c < parts.size(); ++c) {
    out.values.insert(out.values.end(), parts[c].values.begin(), parts[c].values.end());
    out.accepted += parts[c].accepted;
    out.proposed += parts[c].proposed;
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(out.proposed);
  return out;
}

}  // namespace exch
