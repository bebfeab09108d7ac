#include "exch/inference.hpp"

#include <algorithm>
#include <cmath>

#include "exch/error.hpp"
#include "exch/stats.hpp"

namespace exch {

void CellStats::add(std::int64_t y) noexcept {
  const auto v = static_cast<double>(y);
  ++n;
  sum_y += v;
  sum_y2 += v * v;
  if (y > 0) ++events;
}

double CellStats::variance() const noexcept {
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  const double v = (sum_y2 - sum_y * sum_y / dn) / (dn - 1.0);
  return v > 0.0 ? v : 0.0;
}

StratumCounts::StratumCounts(int cap) : cap_(cap) {
  if (cap < 0) throw Error(ErrorCode::InvalidParameter, "bin cap must be >= 0");
  cells_.resize(static_cast<std::size_t>(cap) + 1);
}

std::size_t StratumCounts::bin_of(std::int64_t x) const noexcept {
  return static_cast<std::size_t>(std::min<std::int64_t>(x, cap_));
}

std::string StratumCounts::label(std::size_t bin) const {
  if (bin == static_cast<std::size_t>(cap_)) return "x>=" + std::to_string(cap_);
  return "x=" + std::to_string(bin);
}

void StratumCounts::add(const PointObs& obs) {
  if (obs.x < 0) throw Error(ErrorCode::InvalidParameter, "x must be nonnegative");
  cells_[bin_of(obs.x)][static_cast<std::size_t>(obs.z)].add(obs.y);
}

std::int64_t StratumCounts::total() const noexcept {
  std::int64_t t = 0;
  for (const auto& b : cells_) t += b[0].n + b[1].n;
  return t;
}

StratumCounts bin_x(std::span<const PointObs> data, int cap) {
  StratumCounts counts(cap);
  for (const auto& o : data) counts.add(o);
  return counts;
}

void LongCellCounts::add(const LongObs& obs) { cells_[index(obs.x, obs.z1, obs.z2)].add(obs.y); }

std::int64_t LongCellCounts::total() const noexcept {
  std::int64_t t = 0;
  for (const auto& c : cells_) t += c.n;
  return t;
}

LongCellCounts tabulate_long(std::span<const LongObs> data) {
  LongCellCounts cells;
  for (const auto& o : data) cells.add(o);
  return cells;
}

namespace {

void require_positivity(const StratumCounts& counts) {
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    const auto n1 = counts.cell(b, 1).n;
    const auto n0 = counts.cell(b, 0).n;
    if ((n1 == 0) != (n0 == 0)) {
      throw Error(ErrorCode::PositivityViolation,
                  "positivity violation in stratum " + counts.label(b) + ": " + std::to_string(n1) +
                      " treated, " + std::to_string(n0) + " control");
    }
  }
  if (counts.total() == 0) throw Error(ErrorCode::EmptyGroup, "no units");
}

}  // namespace

std::vector<double> standardization_weights(const StratumCounts& counts) {
  const double n = static_cast<double>(counts.total());
  std::vector<double> w;
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    if (counts.bin_total(b) > 0) w.push_back(static_cast<double>(counts.bin_total(b)) / n);
  }
  return w;
}

ContrastEstimate direct_standardization(const StratumCounts& counts) {
  require_positivity(counts);
  const double n = static_cast<double>(counts.total());
  double point = 0.0;
  double var = 0.0;
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    if (counts.bin_total(b) == 0) continue;
    const CellStats& t = counts.cell(b, 1);
    const CellStats& c = counts.cell(b, 0);
    const double w = static_cast<double>(counts.bin_total(b)) / n;
    point += (t.mean() - c.mean()) * w;
    var += w * w * (t.variance() / static_cast<double>(t.n) + c.variance() / static_cast<double>(c.n));
  }
  return {"standardize", point, std::sqrt(var), {}, {}, {}};
}

ContrastEstimate naive_contrast(std::span<const PointObs> data) {
  const StratumCounts pooled = bin_x(data, 0);
  if (pooled.cell(0, 1).n == 0 || pooled.cell(0, 0).n == 0) {
    throw Error(ErrorCode::EmptyGroup, "naive contrast needs both arms nonempty");
  }
  ContrastEstimate est = direct_standardization(pooled);
  est.method = "naive";
  return est;
}

BinaryArmCounts dichotomize(const StratumCounts& counts) {
  BinaryArmCounts out;
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    out.treated.events += counts.cell(b, 1).events;
    out.treated.trials += counts.cell(b, 1).n;
    out.control.events += counts.cell(b, 0).events;
    out.control.trials += counts.cell(b, 0).n;
  }
  return out;
}

BinaryArmCounts dichotomize(std::span<const PointObs> data) { return dichotomize(bin_x(data, 0)); }

BetaPosterior beta_binomial_update(const BinaryArmCounts& counts, BetaPrior treated, BetaPrior control) {
  for (const BetaPrior& p : {treated, control}) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
      throw Error(ErrorCode::InvalidPrior, "beta prior parameters must be positive and finite");
    }
  }
  for (const ArmEvents& arm : {counts.treated, counts.control}) {
    if (arm.events < 0 || arm.trials < arm.events) {
      throw Error(ErrorCode::InvalidParameter, "events must lie in [0, trials]");
    }
  }
  return {treated.a + static_cast<double>(counts.treated.events),
          treated.b + static_cast<double>(counts.treated.trials - counts.treated.events),
          control.a + static_cast<double>(counts.control.events),
          control.b + static_cast<double>(counts.control.trials - counts.control.events)};
}

namespace {

double beta_variance(double a, double b) { return a * b / ((a + b) * (a + b) * (a + b + 1.0)); }

}  // namespace

ContrastEstimate posterior_predictive_contrast_binary(const BetaPosterior& post) {
  ContrastEstimate est;
  est.method = "beta-binomial";
  // One rounding for the common-denominator form, so integer parameters such
  // as 8/12 - 3/12 come out as the correctly rounded 5/12.
  const double n1 = post.a1 + post.b1, n0 = post.a0 + post.b0;
  est.point = (post.a1 * n0 - post.a0 * n1) / (n1 * n0);
  est.posterior_sd = std::sqrt(beta_variance(post.a1, post.b1) + beta_variance(post.a0, post.b0));
  return est;
}

ContrastEstimate posterior_predictive_contrast_binary(const BetaPosterior& post, std::int64_t draws,
                                                      RngState& rng) {
  ContrastEstimate est = posterior_predictive_contrast_binary(post);
  if (draws < 0) throw Error(ErrorCode::InvalidParameter, "draws must be >= 0");
  est.draws.reserve(static_cast<std::size_t>(draws));
  for (std::int64_t i = 0; i < draws; ++i) {
    const double p1 = sample_beta(rng, post.a1, post.b1);
    const double p0 = sample_beta(rng, post.a0, post.b0);
    est.draws.push_back(p1 - p0);
  }
  if (draws > 1) {
    est.mc_se = std::sqrt(sample_variance(est.draws) / static_cast<double>(draws));
    est.effective_size = static_cast<double>(draws);
  }
  return est;
}

GFormulaResult parametric_g_formula_point(std::span<const PointObs> data, const GFormulaConfig& config,
                                          const RngState& rng) {
  if (!(config.prior_sd > 0.0) || !std::isfinite(config.prior_sd)) {
    throw Error(ErrorCode::InvalidPrior, "prior_sd must be positive and finite");
  }
  const StratumCounts counts = bin_x(data, config.cap);
  require_positivity(counts);

  struct Bin {
    CellStats treated, control;
    double weight;
  };
  std::vector<Bin> bins;
  std::vector<std::string> labels;
  const double n = static_cast<double>(counts.total());
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    if (counts.bin_total(b) == 0) continue;
    bins.push_back({counts.cell(b, 1), counts.cell(b, 0), static_cast<double>(counts.bin_total(b)) / n});
    labels.push_back("alpha[" + counts.label(b) + "]");
  }
  labels.emplace_back("beta");
  const std::size_t k = bins.size();
  const double prior_prec = 1.0 / (config.prior_sd * config.prior_sd);

  // theta = (alpha_1..alpha_k, beta)
  const LogDensity log_post = [&bins, k, prior_prec](std::span<const double> theta) {
    const double beta = theta[k];
    double lp = -0.5 * prior_prec * beta * beta;
    for (std::size_t b = 0; b < k; ++b) {
      const double a = theta[b];
      const double ab = a + beta;
      lp += bins[b].control.sum_y * a - static_cast<double>(bins[b].control.n) * std::exp(a);
      lp += bins[b].treated.sum_y * ab - static_cast<double>(bins[b].treated.n) * std::exp(ab);
      lp -= 0.5 * prior_prec * a * a;
    }
    return lp;
  };

  std::vector<double> init(k + 1, 0.0);
  for (std::size_t b = 0; b < k; ++b) {
    const double sum = bins[b].treated.sum_y + bins[b].control.sum_y;
    const double cnt = static_cast<double>(bins[b].treated.n + bins[b].control.n);
    init[b] = std::log((sum + 0.5) / cnt);
  }

  MetropolisConfig mcmc = config.mcmc;
  if (mcmc.step_sizes.empty()) {
    if (!(config.step_scale > 0.0)) throw Error(ErrorCode::DegenerateStep, "step_scale must be positive");
    double beta_curv = prior_prec;
    for (std::size_t b = 0; b < k; ++b) {
      const double mu = std::exp(init[b]);
      const double curv = static_cast<double>(bins[b].treated.n + bins[b].control.n) * mu + prior_prec;
      mcmc.step_sizes.push_back(config.step_scale / std::sqrt(curv));
      beta_curv += static_cast<double>(bins[b].treated.n) * mu;
    }
    mcmc.step_sizes.push_back(config.step_scale / std::sqrt(beta_curv));
  }

  GFormulaResult result;
  result.posterior = metropolis_sample_chains(log_post, init, mcmc, rng, config.chains);
  result.posterior.labels = labels;
  if (result.posterior.acceptance_rate < 0.05 || result.posterior.acceptance_rate > 0.8) {
    throw Error(ErrorCode::McmcFailure,
                "acceptance rate " + std::to_string(result.posterior.acceptance_rate) + " outside [0.05, 0.8]");
  }

  ContrastEstimate& est = result.estimate;
  est.method = "g-formula-mcmc";
  est.draws.reserve(result.posterior.rows());
  for (std::size_t r = 0; r < result.posterior.rows(); ++r) {
    const auto theta = result.posterior.row(r);
    const double lift = std::expm1(theta[k]);
    double c = 0.0;
    for (std::size_t b = 0; b < k; ++b) c += bins[b].weight * std::exp(theta[b]) * lift;
    est.draws.push_back(c);
  }
  est.point = mean(est.draws);
  const double sd = std::sqrt(sample_variance(est.draws));
  const double ess = effective_sample_size(est.draws);
  est.posterior_sd = sd;
  est.effective_size = ess;
  est.mc_se = sd / std::sqrt(ess);
  return result;
}

RegimeMean g_formula_long(const LongCellCounts& cells, int z1, int z2) {
  if ((z1 != 0 && z1 != 1) || (z2 != 0 && z2 != 1)) {
    throw Error(ErrorCode::InvalidParameter, "regimes are indexed by z1, z2 in {0, 1}");
  }
  std::array<std::int64_t, 2> nx{};
  for (int x = 0; x < 2; ++x) nx[x] = cells.cell(x, z1, 0).n + cells.cell(x, z1, 1).n;
  const std::int64_t nz1 = nx[0] + nx[1];
  if (nz1 == 0) {
    throw Error(ErrorCode::EmptyCell, "empty cell: no units with z1=" + std::to_string(z1));
  }
  for (int x = 0; x < 2; ++x) {
    if (nx[x] > 0 && cells.cell(x, z1, z2).n == 0) {
      throw Error(ErrorCode::EmptyCell, "empty cell (x=" + std::to_string(x) + ", z1=" + std::to_string(z1) +
                                            ", z2=" + std::to_string(z2) + ")");
    }
  }

  RegimeMean out{z1, z2, 0.0, 0.0};
  // Anchored at the first populated stratum so constant outcomes come back exact.
  const int anchor = nx[0] > 0 ? 0 : 1;
  const CellStats& base = cells.cell(anchor, z1, z2);
  out.mean = base.mean();
  double var = 0.0;
  for (int x = 0; x < 2; ++x) {
    if (nx[x] == 0) continue;
    const CellStats& c = cells.cell(x, z1, z2);
    const double p = static_cast<double>(nx[x]) / static_cast<double>(nz1);
    if (x != anchor) out.mean += p * (c.mean() - base.mean());
    var += p * p * c.variance() / static_cast<double>(c.n);
  }
  if (nx[0] > 0 && nx[1] > 0) {
    const double p1 = static_cast<double>(nx[1]) / static_cast<double>(nz1);
    const double diff = cells.cell(1, z1, z2).mean() - cells.cell(0, z1, z2).mean();
    var += diff * diff * p1 * (1.0 - p1) / static_cast<double>(nz1);
  }
  out.se = std::sqrt(var);
  return out;
}

RegimeMean g_formula_long(std::span<const LongObs> data, int z1, int z2) {
  return g_formula_long(tabulate_long(data), z1, z2);
}

NullParadoxReport null_paradox_report(std::span<const LongObs> data) {
  const LongCellCounts cells = tabulate_long(data);
  NullParadoxReport r;
  const CellStats& treated = cells.cell(1, 1, 0);
  const CellStats& control = cells.cell(1, 0, 0);
  if (treated.n == 0 || control.n == 0) {
    throw Error(ErrorCode::EmptyCell, "empty cell: (x=1, z1=1, z2=0) and (x=1, z1=0, z2=0) must be populated");
  }
  r.delta_cond = treated.mean() - control.mean();
  r.delta_cond_se = std::sqrt(treated.variance() / static_cast<double>(treated.n) +
                              control.variance() / static_cast<double>(control.n));
  for (int z1 = 0; z1 < 2; ++z1) {
    for (int z2 = 0; z2 < 2; ++z2) r.regimes[static_cast<std::size_t>(2 * z1 + z2)] = g_formula_long(cells, z1, z2);
  }
  for (int z2 = 0; z2 < 2; ++z2) {
    const RegimeMean& on = r.regimes[static_cast<std::size_t>(2 + z2)];
    const RegimeMean& off = r.regimes[static_cast<std::size_t>(z2)];
    r.delta_marg[static_cast<std::size_t>(z2)] = on.mean - off.mean;
    r.delta_marg_se[static_cast<std::size_t>(z2)] = std::hypot(on.se, off.se);
  }
  return r;
}

nlohmann::json to_json(const ContrastEstimate& est) {
  nlohmann::json j = {{"method", est.method},
                      {"point", est.point},
                      {"mc_se", est.mc_se},
                      {"draw_count", est.draws.size()}};
  if (est.posterior_sd) j["posterior_sd"] = *est.posterior_sd;
  if (est.effective_size) j["effective_size"] = *est.effective_size;
  return j;
}

nlohmann::json to_json(const RegimeMean& m) {
  return {{"z1", m.z1}, {"z2", m.z2}, {"mean", m.mean}, {"se", m.se}};
}

nlohmann::json to_json(const NullParadoxReport& r) {
  nlohmann::json regimes = nlohmann::json::array();
  for (const auto& m : r.regimes) regimes.push_back(to_json(m));
  return {{"delta_cond", r.delta_cond},
          {"delta_cond_se", r.delta_cond_se},
          {"delta_marg", {{"z2=0", r.delta_marg[0]}, {"z2=1", r.delta_marg[1]}}},
          {"delta_marg_se", {{"z2=0", r.delta_marg_se[0]}, {"z2=1", r.delta_marg_se[1]}}},
          {"regimes", regimes}};
}

nlohmann::json to_json(const BetaPosterior& p) {
  return {{"treated", {{"a", p.a1}, {"b", p.b1}}}, {"control", {{"a", p.a0}, {"b", p.b0}}}};
}

}  // namespace exch
