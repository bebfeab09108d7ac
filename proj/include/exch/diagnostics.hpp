#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "exch/dgp.hpp"
#include "exch/inference.hpp"

namespace exch {

struct SummaryRow {
  std::string group;
  std::string variable;  // "x", "u" or "y"
  double mean = 0.0;     // NaN when n == 0
  double sd = 0.0;       // NaN when n == 0
  std::int64_t n = 0;
};

enum class Pooling {
  /// Concatenate all replications' units per group, then summarize once.
  Pooled,
  /// Average the per-replication means and SDs.
  MeanOfReplicates,
};

struct SummaryMeta {
  DgpKind kind = DgpKind::Point;
  double gamma = 0.0;
  std::int64_t replications = 1;
  std::int64_t per_group = 0;
  bool stratified = false;
  Pooling pooling = Pooling::Pooled;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  SummaryMeta meta;

  /// Throws unknown-name when no such row exists.
  const SummaryRow& at(std::string_view group, std::string_view variable) const;
};

/// Group labels, e.g. "Z=1", "Z1=1,Z2=0",
/// "Z1=0,Z2=1,X=1".
std::string point_group_label(int z);
std::string long_group_label(int z1, int z2);
std::string long_stratum_label(int z1, int z2, int x);

/// Mean and sample SD (n - 1) of x, u, y per treatment group, treated first.
SummaryTable group_summaries_point(const PointDataset& data);

/// Mean and SD per (z1, z2) group in the order 11, 10, 01, 00; with
/// `stratify_by_x` the x = 1 block and then the x = 0 block follow. Empty
/// strata are reported with n = 0.
SummaryTable group_summaries_long(const LongDataset& data, bool stratify_by_x);

struct ReplicationConfig {
  DgpKind kind = DgpKind::Point;
  double gamma = 0.0;
  std::int64_t per_group = 250;
  std::int64_t replications = 1000;
  std::uint64_t master_seed = 0;
  bool stratify = false;
  Pooling pooling = Pooling::Pooled;
  int threads = 1;
};

/// Replication r draws a quota sample on rng_split(rng_new(master_seed), r).
/// Reduction is in replication order, so `threads` never changes the result.
SummaryTable replicate_summaries(const ReplicationConfig& config);

struct GapEntry {
  std::string group_a;
  std::string group_b;
  /// mean(group_a) - mean(group_b)
  double gap = 0.0;
};

struct GapReport {
  std::string variable;
  std::vector<GapEntry> gaps;
};

/// Point data: treated minus control. Longitudinal data: all six pairs of the
/// four (z1, z2) groups, taken in the order 11, 10, 01, 00.
GapReport exchangeability_gap(const PointDataset& data, std::string_view variable);
GapReport exchangeability_gap(const LongDataset& data, std::string_view variable);
/// Same report computed from the marginal rows of a summary table.
GapReport exchangeability_gap(const SummaryTable& table, std::string_view variable);

struct PositivityStratum {
  std::string label;
  std::int64_t n_treated = 0;
  std::int64_t n_control = 0;
  bool flagged = false;
};

struct PositivityReport {
  std::vector<PositivityStratum> strata;
  std::int64_t min_count = 1;

  bool any_flagged() const noexcept;
};

/// Arm counts per x bin (cap as in bin_x); a stratum is flagged iff its
/// smaller arm has fewer than `min_count` units. Bins with no units at all
/// are omitted.
PositivityReport positivity_check(std::span<const PointObs> data, int cap, std::int64_t min_count);

/// CSV: group,variable,mean,sd,n (17 significant digits; empty mean/sd when n = 0).
void write_summary_csv(std::ostream& out, const SummaryTable& table);
/// Aligned "mean (sd)" table with one row per group and columns X, U, Y.
void write_summary_text(std::ostream& out, const SummaryTable& table);

}  // namespace exch
