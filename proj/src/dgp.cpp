#include "exch/dgp.hpp"

#include <array>
#include <cmath>
#include <string>

#include "exch/error.hpp"
#include "exch/parallel.hpp"

namespace exch {

std::string_view to_string(Regime r) noexcept {
  return r == Regime::Experimental ? "E" : "O";
}

std::string_view to_string(DgpKind k) noexcept {
  return k == DgpKind::Point ? "point" : "long";
}

DgpKind parse_dgp_kind(std::string_view s) {
  if (s == "point") return DgpKind::Point;
  if (s == "long" || s == "longitudinal") return DgpKind::Longitudinal;
  throw Error(ErrorCode::InvalidParameter, "unknown dgp '" + std::string(s) + "' (point|long)");
}

template <>
std::vector<PointObs> PointDataset::observed() const {
  std::vector<PointObs> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back({r.x, r.z, r.y});
  return out;
}

template <>
std::vector<LongObs> LongDataset::observed() const {
  std::vector<LongObs> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back({r.z1, r.x, r.z2, r.y});
  return out;
}

PointRecord gen_point_unit(RngState& rng, double gamma) {
  if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidParameter, "gamma must be finite");
  PointRecord r;
  r.u = sample_normal(rng, 0.0, 1.0);
  const double eu = std::exp(r.u);
  r.x = sample_poisson(rng, eu);
  r.z = sample_bernoulli(rng, expit(gamma * static_cast<double>(r.x)));
  r.y = sample_poisson(rng, static_cast<double>(r.x) + eu);
  return r;
}

LongRecord gen_long_unit(RngState& rng, double gamma) {
  if (!std::isfinite(gamma)) throw Error(ErrorCode::InvalidParameter, "gamma must be finite");
  LongRecord r;
  r.u = sample_normal(rng, 0.0, 1.0);
  r.z1 = sample_bernoulli(rng, 0.5);
  r.x = sample_bernoulli(rng, expit(-r.u + 2.0 * r.z1));
  r.z2 = sample_bernoulli(rng, expit(gamma * r.x + r.z1));
  r.y = sample_poisson(rng, std::exp(r.u));
  return r;
}

namespace {

void check_quota(std::int64_t per_group) {
  if (per_group < 1) throw Error(ErrorCode::InvalidParameter, "per_group must be >= 1");
}

template <class Record, std::size_t Groups, class Gen, class GroupOf>
std::vector<Record> quota_sample(RngState& rng, std::int64_t per_group, Gen gen, GroupOf group_of) {
  check_quota(per_group);
  std::array<std::int64_t, Groups> filled{};
  std::size_t open = Groups;
  std::vector<Record> kept;
  kept.reserve(static_cast<std::size_t>(per_group) * Groups);
  for (std::int64_t draws = 0; open > 0; ++draws) {
    if (draws >= kQuotaDrawLimit) {
      throw Error(ErrorCode::QuotaUnreachable,
                  "quota not filled after " + std::to_string(kQuotaDrawLimit) + " draws");
    }
    Record r = gen(rng);
    auto& n = filled[group_of(r)];
    if (n < per_group) {
      kept.push_back(r);
      if (++n == per_group) --open;
    }
  }
  return kept;
}

Provenance make_provenance(DgpKind kind, const RngState& rng, double gamma, std::int64_t per_group) {
  return {kind, regime_for_gamma(gamma), gamma, rng.master_seed(), rng.stream_index(), per_group, 1};
}

}  // namespace

PointDataset quota_sample_point(RngState& rng, double gamma, std::int64_t per_group) {
  const Provenance prov = make_provenance(DgpKind::Point, rng, gamma, per_group);
  auto records = quota_sample<PointRecord, 2>(
      rng, per_group, [gamma](RngState& r) { return gen_point_unit(r, gamma); },
      [](const PointRecord& r) { return static_cast<std::size_t>(r.z); });
  return PointDataset(std::move(records), prov);
}

LongDataset quota_sample_long(RngState& rng, double gamma, std::int64_t per_group) {
  const Provenance prov = make_provenance(DgpKind::Longitudinal, rng, gamma, per_group);
  auto records = quota_sample<LongRecord, 4>(
      rng, per_group, [gamma](RngState& r) { return gen_long_unit(r, gamma); },
      [](const LongRecord& r) { return static_cast<std::size_t>(2 * r.z1 + r.z2); });
  return LongDataset(std::move(records), prov);
}

namespace {

template <class DatasetT, class Sampler>
DatasetT replicate(DgpKind kind, std::uint64_t master_seed, double gamma, std::int64_t per_group,
                   std::int64_t replications, int threads, Sampler sampler) {
  if (replications < 1) throw Error(ErrorCode::InvalidParameter, "replications must be >= 1");
  check_quota(per_group);
  const RngState master = rng_new(master_seed);
  auto parts = parallel_map(replications, threads, [&](std::int64_t r) {
    RngState stream = rng_split(master, static_cast<std::uint64_t>(r));
    return sampler(stream, gamma, per_group);
  });
  std::vector<typename DatasetT::record_type> all;
  all.reserve(static_cast<std::size_t>(replications) * parts.front().size());
  for (const auto& p : parts) all.insert(all.end(), p.records().begin(), p.records().end());
  Provenance prov{kind, regime_for_gamma(gamma), gamma, master_seed, 0, per_group, replications};
  return DatasetT(std::move(all), prov);
}

}  // namespace

PointDataset replicate_point(std::uint64_t master_seed, double gamma, std::int64_t per_group,
                             std::int64_t replications, int threads) {
  return replicate<PointDataset>(DgpKind::Point, master_seed, gamma, per_group, replications,
                                 threads, quota_sample_point);
}

LongDataset replicate_long(std::uint64_t master_seed, double gamma, std::int64_t per_group,
                           std::int64_t replications, int threads) {
  return replicate<LongDataset>(DgpKind::Longitudinal, master_seed, gamma, per_group,
                                replications, threads, quota_sample_long);
}

}  // namespace exch
