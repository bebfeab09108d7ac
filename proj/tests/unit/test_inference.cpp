#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "exch/error.hpp"
#include "exch/inference.hpp"

using namespace exch;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exch::Error");
  return ErrorCode::Io;
}

std::vector<PointObs> hand_strata() {
  // x=0: treated {1,3}, control {0,2}; x=1: treated {5}, control {3,5}.
  return {{0, 1, 1}, {0, 1, 3}, {0, 0, 0}, {0, 0, 2}, {1, 1, 5}, {1, 0, 3}, {1, 0, 5}};
}

std::vector<PointObs> simulated(std::uint64_t seed, double gamma, std::int64_t per_group, std::int64_t reps) {
  return replicate_point(seed, gamma, per_group, reps).observed();
}

}  // namespace

TEST_CASE("bin_x binning rule") {
  const StratumCounts c = bin_x(std::vector<PointObs>{{0, 1, 0}, {3, 1, 0}, {9, 0, 0}, {12, 0, 0}}, 8);
  CHECK(c.num_bins() == 9);
  CHECK(c.bin_of(0) == 0);
  CHECK(c.bin_of(3) == 3);
  CHECK(c.bin_of(9) == 8);
  CHECK(c.bin_of(12) == 8);
  CHECK(c.label(3) == "x=3");
  CHECK(c.label(8) == "x>=8");
  CHECK(c.bin_total(8) == 2);
  CHECK(c.total() == 4);
  CHECK(bin_x(std::vector<PointObs>{{5, 1, 0}}, 0).num_bins() == 1);
  CHECK(bin_x(std::vector<PointObs>{{5, 1, 0}}, 1).num_bins() == 2);
  CHECK_THROWS_AS(StratumCounts(-1), Error);
}

TEST_CASE("stratum totals agree with records") {
  const auto data = simulated(2, -0.25, 200, 1);
  const StratumCounts c = bin_x(data, 8);
  CHECK(c.total() == static_cast<std::int64_t>(data.size()));
  double sum = 0, counted = 0;
  for (const auto& o : data) sum += static_cast<double>(o.y);
  for (std::size_t b = 0; b < c.num_bins(); ++b) counted += c.cell(b, 0).sum_y + c.cell(b, 1).sum_y;
  CHECK(std::fabs(sum - counted) < 1e-12);
}

TEST_CASE("naive contrast") {
  const ContrastEstimate e = naive_contrast(hand_strata());
  CHECK(e.point == doctest::Approx(3.0 - 2.5));
  std::vector<PointObs> flat;
  for (int i = 0; i < 10; ++i) flat.push_back({i, i % 2, 4});
  CHECK(naive_contrast(flat).point == 0.0);
  CHECK(code_of([] { naive_contrast(std::vector<PointObs>{{0, 1, 1}}); }) == ErrorCode::EmptyGroup);
}

TEST_CASE("direct standardization hand example") {
  const StratumCounts c = bin_x(hand_strata(), 8);
  const auto w = standardization_weights(c);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(4.0 / 7.0));
  CHECK(w[1] == doctest::Approx(3.0 / 7.0));
  CHECK(direct_standardization(c).point == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("standardization weights sum to one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = standardization_weights(bin_x(simulated(seed, -0.25, 50, 1), 8));
    double s = 0;
    for (double v : w) s += v;
    CHECK(std::fabs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("single-stratum standardization collapses to the naive contrast") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = simulated(seed, -0.25, 80, 1);
    const ContrastEstimate ds = direct_standardization(bin_x(data, 0));
    const ContrastEstimate nv = naive_contrast(data);
    CHECK(ds.point == nv.point);
    CHECK(ds.mc_se == nv.mc_se);
  }
}

TEST_CASE("positivity violation names the stratum") {
  std::vector<PointObs> d = {{0, 1, 1}, {0, 0, 1}, {2, 1, 3}};
  try {
    direct_standardization(bin_x(d, 8));
    FAIL("expected positivity violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PositivityViolation);
    CHECK(std::string(e.what()).find("x=2") != std::string::npos);
  }
}

TEST_CASE("estimators are invariant under record permutation") {
  auto data = simulated(41, -0.25, 150, 1);
  const double nv = naive_contrast(data).point;
  const double ds = direct_standardization(bin_x(data, 4)).point;
  const BetaPosterior bp = beta_binomial_update(dichotomize(data));
  std::mt19937_64 gen(3);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(data.begin(), data.end(), gen);
    CHECK(naive_contrast(data).point == doctest::Approx(nv).epsilon(1e-12));
    CHECK(direct_standardization(bin_x(data, 4)).point == doctest::Approx(ds).epsilon(1e-12));
    const BetaPosterior q = beta_binomial_update(dichotomize(data));
    CHECK(q.a1 == bp.a1);
    CHECK(q.b0 == bp.b0);
  }

  auto ldata = replicate_long(41, -1.0, 60, 1).observed();
  const NullParadoxReport r = null_paradox_report(ldata);
  std::shuffle(ldata.begin(), ldata.end(), gen);
  const NullParadoxReport s = null_paradox_report(ldata);
  CHECK(r.delta_cond == doctest::Approx(s.delta_cond).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(r.regimes[i].mean == doctest::Approx(s.regimes[i].mean).epsilon(1e-12));
}

TEST_CASE("beta-binomial updates") {
  const BetaPosterior p = beta_binomial_update({{7, 10}, {0, 5}});
  CHECK(p.a1 == 8.0);
  CHECK(p.b1 == 4.0);
  CHECK(p.a0 == 1.0);
  CHECK(p.b0 == 6.0);
  const BetaPosterior empty = beta_binomial_update({}, {2.5, 0.5}, {1.0, 3.0});
  CHECK(empty.a1 == 2.5);
  CHECK(empty.b1 == 0.5);
  CHECK(empty.b0 == 3.0);
  CHECK(code_of([] { beta_binomial_update({}, {0.0, 1.0}); }) == ErrorCode::InvalidPrior);
  CHECK(code_of([] { beta_binomial_update({{5, 3}, {}}); }) == ErrorCode::InvalidParameter);

  CHECK(posterior_predictive_contrast_binary({8, 4, 3, 9}).point == 5.0 / 12.0);
  CHECK(posterior_predictive_contrast_binary({2, 7, 2, 7}).point == 0.0);
}

TEST_CASE("conjugacy oracle on random configurations") {
  std::mt19937_64 gen(2718);
  std::uniform_int_distribution<std::int64_t> trials(0, 500);
  std::uniform_real_distribution<double> prior(0.1, 20.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t n1 = trials(gen), n0 = trials(gen);
    const std::int64_t s1 = std::uniform_int_distribution<std::int64_t>(0, n1)(gen);
    const std::int64_t s0 = std::uniform_int_distribution<std::int64_t>(0, n0)(gen);
    const BetaPrior p1{prior(gen), prior(gen)}, p0{prior(gen), prior(gen)};
    const double got = posterior_predictive_contrast_binary(beta_binomial_update({{s1, n1}, {s0, n0}}, p1, p0)).point;
    const double want = (p1.a + s1) / (p1.a + p1.b + n1) - (p0.a + s0) / (p0.a + p0.b + n0);
    worst = std::max(worst, std::fabs(got - want));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("predictive contrast converges to the frequency difference") {
  std::mt19937_64 gen(99);
  std::bernoulli_distribution e1(0.7), e0(0.4);
  std::vector<PointObs> data;
  for (int i = 0; i < 20000; ++i) data.push_back({0, i % 2, (i % 2 ? e1(gen) : e0(gen)) ? 1 : 0});
  const BinaryArmCounts all = dichotomize(data);
  const double limit = static_cast<double>(all.treated.events) / all.treated.trials -
                       static_cast<double>(all.control.events) / all.control.trials;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const std::span<const PointObs> prefix(data.data(), n);
    const BinaryArmCounts c = dichotomize(prefix);
    const double freq = static_cast<double>(c.treated.events) / c.treated.trials -
                        static_cast<double>(c.control.events) / c.control.trials;
    const double got = posterior_predictive_contrast_binary(beta_binomial_update(c)).point;
    const double bound = 2.0 / static_cast<double>(std::min(c.treated.trials, c.control.trials));
    CHECK(std::fabs(got - freq) <= bound);
    CHECK(std::fabs(got - limit) <= bound + 4.0 * std::sqrt(0.5 / static_cast<double>(n)));
  }
}

TEST_CASE("predictive contrast draws") {
  RngState rng = rng_new(6);
  const ContrastEstimate e = posterior_predictive_contrast_binary({8, 4, 3, 9}, 20000, rng);
  CHECK(e.point == 5.0 / 12.0);
  CHECK(e.draws.size() == 20000);
  double m = 0;
  for (double d : e.draws) m += d;
  m /= static_cast<double>(e.draws.size());
  CHECK(std::fabs(m - 5.0 / 12.0) < 4 * e.mc_se);
  CHECK(e.posterior_sd.has_value());
}

TEST_CASE("longitudinal g-formula reductions") {
  SUBCASE("constant outcome") {
    auto data = replicate_long(8, -1.0, 40, 1).observed();
    for (auto& o : data) o.y = 3;
    for (int z1 = 0; z1 < 2; ++z1)
      for (int z2 = 0; z2 < 2; ++z2) CHECK(g_formula_long(data, z1, z2).mean == 3.0);
    const NullParadoxReport r = null_paradox_report(data);
    CHECK(r.delta_cond == 0.0);
    CHECK(r.delta_marg[0] == 0.0);
    CHECK(r.delta_marg[1] == 0.0);
  }
  SUBCASE("constant treatment reduces to cell means") {
    std::vector<LongObs> data;
    std::mt19937_64 gen(1);
    std::poisson_distribution<int> pois(2.0);
    for (int i = 0; i < 400; ++i) data.push_back({(i >> 1) & 1, 1, i & 1, pois(gen)});
    for (int z1 = 0; z1 < 2; ++z1)
      for (int z2 = 0; z2 < 2; ++z2) {
        double s = 0, n = 0;
        for (const auto& o : data)
          if (o.z1 == z1 && o.z2 == z2) s += static_cast<double>(o.y), n += 1;
        CHECK(g_formula_long(data, z1, z2).mean == doctest::Approx(s / n).epsilon(1e-14));
      }
  }
  SUBCASE("hand example") {
    std::vector<LongObs> d = {{1, 1, 0, 4}, {1, 1, 0, 2}, {1, 1, 1, 1}, {1, 0, 1, 6}, {1, 0, 0, 8}};
    const RegimeMean m = g_formula_long(d, 1, 0);
    // ybar(x=1,z1=1,z2=0)=3, ybar(x=0,..)=8, P(x=1|z1=1) = 3/5.
    CHECK(m.mean == doctest::Approx(3.0 * 0.6 + 8.0 * 0.4).epsilon(1e-14));
    try {
      g_formula_long(d, 0, 0);
      FAIL("expected empty cell");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCell);
      CHECK(std::string(e.what()).find("z1=0") != std::string::npos);
    }
  }
}

TEST_CASE("parametric g-formula on a small dataset") {
  const auto data = simulated(12, -0.25, 300, 1);
  GFormulaConfig cfg;
  cfg.cap = 4;
  cfg.mcmc = {6000, 1000, 1, {}};
  const GFormulaResult a = parametric_g_formula_point(data, cfg, rng_new(4));
  const GFormulaResult b = parametric_g_formula_point(data, cfg, rng_new(4));
  CHECK(a.estimate.draws == b.estimate.draws);
  CHECK(a.estimate.draws.size() == 5000);
  double m = 0;
  for (double d : a.estimate.draws) m += d;
  CHECK(a.estimate.point == doctest::Approx(m / 5000).epsilon(1e-12));
  CHECK(a.posterior.acceptance_rate > 0.05);
  CHECK(a.posterior.acceptance_rate < 0.8);
  const double ds = direct_standardization(bin_x(data, 4)).point;
  CHECK(std::fabs(a.estimate.point - ds) < 0.6);
  CHECK(a.posterior.labels.back() == "beta");

  std::vector<PointObs> bad = {{0, 1, 1}, {0, 0, 1}, {2, 1, 3}};
  CHECK(code_of([&] { parametric_g_formula_point(bad, cfg, rng_new(1)); }) == ErrorCode::PositivityViolation);
}

TEST_CASE("json serialization") {
  const auto j = to_json(direct_standardization(bin_x(hand_strata(), 8)));
  CHECK(j.at("method") == "standardize");
  CHECK(j.at("point").get<double>() == doctest::Approx(1.0));
  CHECK(to_json(BetaPosterior{8, 4, 3, 9}).at("treated").at("a") == 8.0);
}
