#include <cmath>
#include <vector>

#include "doctest.h"
#include "exch/error.hpp"
#include "exch/rng.hpp"
#include "exch/stats.hpp"

using namespace exch;

namespace {

std::vector<double> uniforms(RngState rng, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(rng.uniform());
  return out;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  // Random123 kat_vectors for philox4x32_10.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng_new is deterministic and seed-sensitive") {
  CHECK(uniforms(rng_new(42), 100) == uniforms(rng_new(42), 100));
  CHECK(uniforms(rng_new(1), 1000) != uniforms(rng_new(2), 1000));
  RngState zero = rng_new(0);
  CHECK(zero.stream_index() == 0);
  CHECK(zero.position() == 0);
  const double u = zero.uniform();
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
}

TEST_CASE("rng_split leaves the parent alone and separates indices") {
  RngState parent = rng_new(9);
  parent.next_u64();
  const RngState before = parent;
  const RngState a = rng_split(parent, 5);
  const RngState b = rng_split(parent, 5);
  const RngState c = rng_split(parent, 6);
  CHECK(parent == before);
  CHECK(uniforms(a, 50) == uniforms(b, 50));
  CHECK(uniforms(a, 50) != uniforms(c, 50));
  CHECK(a.stream_index() != c.stream_index());
  CHECK(a.position() == 0);

  // 4 / sqrt(n) bound on the sample correlation of independent streams.
  const auto x = uniforms(rng_split(rng_new(3), 1), 100000);
  const auto y = uniforms(rng_split(rng_new(3), 2), 100000);
  CHECK(std::fabs(correlation(x, y)) < 0.01);
}

TEST_CASE("substream pairs look independent") {
  RngState master = rng_new(2024);
  int good = 0;
  for (std::uint64_t p = 0; p < 100; ++p) {
    const auto x = uniforms(rng_split(master, 2 * p), 10000);
    const auto y = uniforms(rng_split(master, 2 * p + 1), 10000);
    if (std::fabs(correlation(x, y)) < 0.05) ++good;
  }
  CHECK(good >= 95);
}

TEST_CASE("normal sampler") {
  RngState rng = rng_new(11);
  CHECK(sample_normal(rng, 3.25, 0.0) == 3.25);
  CHECK(rng.position() == 0);
  std::vector<double> d;
  for (int i = 0; i < 100000; ++i) d.push_back(sample_normal(rng, 0.0, 1.0));
  CHECK(std::fabs(mean(d)) < 0.015);
  CHECK(std::fabs(sample_variance(d) - 1.0) < 0.03);
  CHECK_THROWS_AS(sample_normal(rng, 0.0, -1.0), Error);
  CHECK_THROWS_AS(sample_normal(rng, NAN, 1.0), Error);
  CHECK_THROWS_AS(sample_normal(rng, 0.0, INFINITY), Error);
}

TEST_CASE("poisson sampler") {
  RngState rng = rng_new(12);
  CHECK(sample_poisson(rng, 0.0) == 0);
  std::vector<double> d;
  for (int i = 0; i < 100000; ++i) d.push_back(static_cast<double>(sample_poisson(rng, 2.5)));
  CHECK(std::fabs(mean(d) - 2.5) < 0.02);
  CHECK(std::fabs(sample_variance(d) - 2.5) < 0.1);
  CHECK_THROWS_AS(sample_poisson(rng, -0.1), Error);
  CHECK_THROWS_AS(sample_poisson(rng, NAN), Error);

  SUBCASE("rejection branch above the Knuth cutoff") {
    std::vector<double> big;
    for (int i = 0; i < 100000; ++i) big.push_back(static_cast<double>(sample_poisson(rng, 45.0)));
    // 4 * sqrt(45 / 1e5) ~ 0.085
    CHECK(std::fabs(mean(big) - 45.0) < 0.085);
    CHECK(std::fabs(sample_variance(big) - 45.0) < 1.8);
  }
}

TEST_CASE("bernoulli sampler") {
  RngState rng = rng_new(13);
  CHECK(sample_bernoulli(rng, 0.0) == 0);
  CHECK(sample_bernoulli(rng, 1.0) == 1);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += sample_bernoulli(rng, 0.3);
  CHECK(std::fabs(s / 100000 - 0.3) < 0.006);
  CHECK_THROWS_AS(sample_bernoulli(rng, 1.5), Error);
  CHECK_THROWS_AS(sample_bernoulli(rng, -0.1), Error);
}

TEST_CASE("beta sampler") {
  RngState rng = rng_new(14);
  std::vector<double> flat, skew;
  for (int i = 0; i < 100000; ++i) {
    flat.push_back(sample_beta(rng, 1.0, 1.0));
    skew.push_back(sample_beta(rng, 8.0, 4.0));
  }
  CHECK(std::fabs(mean(flat) - 0.5) < 0.004);
  CHECK(std::fabs(mean(skew) - 8.0 / 12.0) < 0.006);
  bool inside = true;
  for (double v : flat) inside = inside && v > 0.0 && v < 1.0;
  for (double v : skew) inside = inside && v > 0.0 && v < 1.0;
  CHECK(inside);
  // Shapes below one go through the boosted gamma branch.
  std::vector<double> small;
  for (int i = 0; i < 100000; ++i) small.push_back(sample_beta(rng, 0.5, 0.5));
  CHECK(std::fabs(mean(small) - 0.5) < 0.006);
  CHECK_THROWS_AS(sample_beta(rng, 0.0, 1.0), Error);
  CHECK_THROWS_AS(sample_beta(rng, 1.0, -2.0), Error);
}

TEST_CASE("expit") {
  CHECK(expit(0.0) == 0.5);
  CHECK(expit(-1.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
  CHECK(std::fabs(expit(-1.0) - 0.26894) < 1e-5);
  CHECK(std::fabs(expit(50.0) - 1.0) < 1e-12);
  CHECK(std::isfinite(expit(-800.0)));
  CHECK(expit(-800.0) >= 0.0);
  CHECK(expit(800.0) == 1.0);
}

TEST_CASE("draw sequences are bit-reproducible across samplers") {
  auto run = [] {
    RngState rng = rng_split(rng_new(77), 3);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      out.push_back(sample_normal(rng, 1.0, 2.0));
      out.push_back(static_cast<double>(sample_poisson(rng, 0.7 + i)));
      out.push_back(sample_bernoulli(rng, 0.4));
      out.push_back(sample_beta(rng, 2.0, 3.0));
    }
    return out;
  };
  CHECK(run() == run());
}
