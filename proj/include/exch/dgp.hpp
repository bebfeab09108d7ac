#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "exch/rng.hpp"

namespace exch {

/// One unit of the point-treatment simulation. `u` is the latent immune
/// status; only the simulator and the diagnostics see it.
struct PointRecord {
  std::int64_t x = 0;
  int z = 0;
  std::int64_t y = 0;
  double u = 0.0;

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

/// One unit of the two-time-point simulation.
struct LongRecord {
  int z1 = 0;
  int x = 0;
  int z2 = 0;
  std::int64_t y = 0;
  double u = 0.0;

  friend bool operator==(const LongRecord&, const LongRecord&) = default;
};

// Observed projections. Estimators are written against these, so the latent
// variable is unreachable from inference code.
struct PointObs {
  std::int64_t x = 0;
  int z = 0;
  std::int64_t y = 0;
};

struct LongObs {
  int z1 = 0;
  int x = 0;
  int z2 = 0;
  std::int64_t y = 0;
};

enum class Regime { Observational, Experimental };
enum class DgpKind { Point, Longitudinal };

std::string_view to_string(Regime r) noexcept;
std::string_view to_string(DgpKind k) noexcept;
DgpKind parse_dgp_kind(std::string_view s);

struct Provenance {
  DgpKind kind = DgpKind::Point;
  Regime regime = Regime::Observational;
  double gamma = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  std::int64_t per_group = 0;
  /// Number of quota samples concatenated into this dataset.
  std::int64_t replications = 1;
};

/// The experimental regime is the confounding-free special case gamma == 0.
inline Regime regime_for_gamma(double gamma) noexcept {
  return gamma == 0.0 ? Regime::Experimental : Regime::Observational;
}

template <class Record, class Obs>
class Dataset {
 public:
  using record_type = Record;
  using obs_type = Obs;

  Dataset() = default;
  Dataset(std::vector<Record> records, Provenance provenance)
      : records_(std::move(records)), provenance_(provenance) {}

  /// Full records including the latent variable. For diagnostics only.
  std::span<const Record> records() const noexcept { return records_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Observed columns, in record order.
  std::vector<Obs> observed() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<Record> records_;
  Provenance provenance_;
};

using PointDataset = Dataset<PointRecord, PointObs>;
using LongDataset = Dataset<LongRecord, LongObs>;

template <>
std::vector<PointObs> PointDataset::observed() const;
template <>
std::vector<LongObs> LongDataset::observed() const;

/// u ~ N(0,1); x ~ Poisson(e^u); z ~ Bernoulli(expit(gamma x));
/// y ~ Poisson(x + e^u), drawn in that order. y never reads z.
PointRecord gen_point_unit(RngState& rng, double gamma);

/// u ~ N(0,1); z1 ~ Bernoulli(1/2); x ~ Bernoulli(expit(2 z1 - u));
/// z2 ~ Bernoulli(expit(gamma x + z1)); y ~ Poisson(e^u), drawn in that order.
LongRecord gen_long_unit(RngState& rng, double gamma);

/// Upper bound on units drawn by a quota sampler before it gives up.
inline constexpr std::int64_t kQuotaDrawLimit = 1'000'000'000;

/*!
 * Draws units in sequence and keeps each one iff its treatment group is still
 * below `per_group`; stops once both groups are full. Kept units stay in draw
 * order.
 */
PointDataset quota_sample_point(RngState& rng, double gamma, std::int64_t per_group);

/// Same scheme over the four (z1, z2) groups.
LongDataset quota_sample_long(RngState& rng, double gamma, std::int64_t per_group);

/// Replication r uses rng_split(master, r); the datasets are concatenated in
/// replication order. `threads` only affects wall time.
PointDataset replicate_point(std::uint64_t master_seed, double gamma, std::int64_t per_group,
                             std::int64_t replications, int threads = 1);
LongDataset replicate_long(std::uint64_t master_seed, double gamma, std::int64_t per_group,
                           std::int64_t replications, int threads = 1);

}  // namespace exch
