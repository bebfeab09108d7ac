#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "exch/dgp.hpp"
#include "exch/mcmc.hpp"
#include "exch/rng.hpp"

namespace exch {

/// Outcome sufficient statistics of one (stratum, arm) cell. Outcomes are
/// integer counts, so the sums are exact and independent of record order.
struct CellStats {
  std::int64_t n = 0;
  double sum_y = 0.0;
  double sum_y2 = 0.0;
  /// Units with y > 0 (the dichotomized outcome).
  std::int64_t events = 0;

  void add(std::int64_t y) noexcept;
  double mean() const noexcept { return sum_y / static_cast<double>(n); }
  /// Sample variance (n - 1 divisor); zero for n < 2.
  double variance() const noexcept;
};

/*!
 * Point-treatment data tabulated by (x bin, z). Bins are x = 0, ..., K-1 and a
 * pooled tail x >= K; K = 0 puts every unit in a single stratum.
 */
class StratumCounts {
 public:
  explicit StratumCounts(int cap);

  int cap() const noexcept { return cap_; }
  std::size_t num_bins() const noexcept { return cells_.size(); }
  std::size_t bin_of(std::int64_t x) const noexcept;
  /// "x=3" or "x>=8".
  std::string label(std::size_t bin) const;

  void add(const PointObs& obs);

  const CellStats& cell(std::size_t bin, int z) const { return cells_.at(bin)[static_cast<std::size_t>(z)]; }
  std::int64_t bin_total(std::size_t bin) const { return cell(bin, 0).n + cell(bin, 1).n; }
  std::int64_t total() const noexcept;

 private:
  int cap_;
  std::vector<std::array<CellStats, 2>> cells_;
};

StratumCounts bin_x(std::span<const PointObs> data, int cap);

/// Two-time-point data tabulated by (x, z1, z2).
class LongCellCounts {
 public:
  void add(const LongObs& obs);
  const CellStats& cell(int x, int z1, int z2) const { return cells_[index(x, z1, z2)]; }
  std::int64_t total() const noexcept;

 private:
  static std::size_t index(int x, int z1, int z2) noexcept {
    return static_cast<std::size_t>(4 * x + 2 * z1 + z2);
  }
  std::array<CellStats, 8> cells_{};
};

LongCellCounts tabulate_long(std::span<const LongObs> data);

struct ContrastEstimate {
  std::string method;
  double point = 0.0;
  /// Standard error: sampling SE for frequentist estimators, Monte Carlo
  /// error of the posterior mean for sampled ones.
  double mc_se = 0.0;
  /// Posterior contrast draws, when the estimator samples.
  std::vector<double> draws;
  std::optional<double> posterior_sd;
  std::optional<double> effective_size;
};

/// Difference of arm means of y with the unpooled two-sample standard error.
ContrastEstimate naive_contrast(std::span<const PointObs> data);

/// Stratum weights n_x / n over nonempty strata, in bin order.
std::vector<double> standardization_weights(const StratumCounts& counts);

/// Sum over strata of (treated mean - control mean) * n_x / n. Throws
/// positivity-violation when a nonempty stratum lacks one arm.
ContrastEstimate direct_standardization(const StratumCounts& counts);

struct BetaPrior {
  double a = 1.0;
  double b = 1.0;
};

struct ArmEvents {
  std::int64_t events = 0;
  std::int64_t trials = 0;
};

struct BinaryArmCounts {
  ArmEvents treated;
  ArmEvents control;
};

/// Event indicator 1{y > 0} per arm.
BinaryArmCounts dichotomize(std::span<const PointObs> data);
BinaryArmCounts dichotomize(const StratumCounts& counts);

struct BetaPosterior {
  double a1 = 1.0, b1 = 1.0;  // treated
  double a0 = 1.0, b0 = 1.0;  // control
};

/// a' = a + events, b' = b + (trials - events), per arm.
BetaPosterior beta_binomial_update(const BinaryArmCounts& counts, BetaPrior treated = {},
                                   BetaPrior control = {});

/// a1/(a1+b1) - a0/(a0+b0), the predictive contrast for one further unit per
/// arm. The point value is always the closed form; when `draws` > 0 posterior
/// contrast draws are attached and mc_se is their Monte Carlo error.
ContrastEstimate posterior_predictive_contrast_binary(const BetaPosterior& post);
ContrastEstimate posterior_predictive_contrast_binary(const BetaPosterior& post, std::int64_t draws,
                                                      RngState& rng);

struct GFormulaConfig {
  int cap = 8;
  double prior_sd = 10.0;
  /// Proposal scale in units of each coordinate's conditional posterior SD
  /// at the starting point (Laplace curvature).
  double step_scale = 2.4;
  int chains = 1;
  MetropolisConfig mcmc{20'000, 2'000, 1, {}};
};

struct GFormulaResult {
  ContrastEstimate estimate;
  PosteriorDraws posterior;
};

/*!
 * Parametric Bayesian g-formula for the point-treatment setting.
 *
 * Outcome model: y | bin b, z ~ Poisson(exp(alpha_b + beta z)), one intercept
 * per nonempty x bin, independent N(0, prior_sd^2) priors. Each retained
 * draw is standardized over the empirical bin distribution:
 *   sum_b (n_b / n) exp(alpha_b) (exp(beta) - 1).
 * The treatment model is never fitted. Chain c runs on rng_split(rng, c).
 */
GFormulaResult parametric_g_formula_point(std::span<const PointObs> data, const GFormulaConfig& config,
                                          const RngState& rng);

struct RegimeMean {
  int z1 = 0;
  int z2 = 0;
  double mean = 0.0;
  double se = 0.0;
};

/// sum_x ybar(x, z1, z2) * P(x | z1), with P(x | z1) the empirical share over
/// both z2 arms. Throws empty-cell for a needed (x, z1, z2) cell with no units.
RegimeMean g_formula_long(std::span<const LongObs> data, int z1, int z2);
RegimeMean g_formula_long(const LongCellCounts& cells, int z1, int z2);

struct NullParadoxReport {
  /// ybar(x=1, z1=1, z2=0) - ybar(x=1, z1=0, z2=0).
  double delta_cond = 0.0;
  double delta_cond_se = 0.0;
  /// g(1, z2) - g(0, z2), indexed by z2.
  std::array<double, 2> delta_marg{};
  std::array<double, 2> delta_marg_se{};
  /// Regime means in (z1, z2) order 00, 01, 10, 11.
  std::array<RegimeMean, 4> regimes{};
};

NullParadoxReport null_paradox_report(std::span<const LongObs> data);

nlohmann::json to_json(const ContrastEstimate& est);
nlohmann::json to_json(const RegimeMean& m);
nlohmann::json to_json(const NullParadoxReport& r);
nlohmann::json to_json(const BetaPosterior& p);

}  // namespace exch
