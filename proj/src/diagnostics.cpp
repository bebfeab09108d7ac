#include "exch/diagnostics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "exch/dataset_io.hpp"
#include "exch/error.hpp"
#include "exch/parallel.hpp"
#include "exch/stats.hpp"

namespace exch {

namespace {

constexpr std::array<const char*, 3> kVariables = {"x", "u", "y"};
constexpr std::array<std::array<int, 2>, 4> kLongGroups = {{{1, 1}, {1, 0}, {0, 1}, {0, 0}}};

struct GroupAccum {
  std::string label;
  std::array<RunningStats, 3> vars;  // x, u, y
  bool required = true;              // marginal groups must be nonempty

  void push(double x, double u, double y) {
    vars[0].push(x);
    vars[1].push(u);
    vars[2].push(y);
  }
};

using Accums = std::vector<GroupAccum>;

Accums accumulate(const PointDataset& data) {
  Accums acc(2);
  acc[0].label = point_group_label(1);
  acc[1].label = point_group_label(0);
  for (const auto& r : data.records()) {
    acc[r.z == 1 ? 0 : 1].push(static_cast<double>(r.x), r.u, static_cast<double>(r.y));
  }
  return acc;
}

std::size_t long_group_index(int z1, int z2) { return static_cast<std::size_t>(3 - (2 * z1 + z2)); }

Accums accumulate(const LongDataset& data, bool stratify) {
  Accums acc(stratify ? 12 : 4);
  for (std::size_t g = 0; g < 4; ++g) {
    const auto [z1, z2] = kLongGroups[g];
    acc[g].label = long_group_label(z1, z2);
    if (stratify) {
      acc[4 + g].label = long_stratum_label(z1, z2, 1);
      acc[4 + g].required = false;
      acc[8 + g].label = long_stratum_label(z1, z2, 0);
      acc[8 + g].required = false;
    }
  }
  for (const auto& r : data.records()) {
    const std::size_t g = long_group_index(r.z1, r.z2);
    const double x = r.x, y = static_cast<double>(r.y);
    acc[g].push(x, r.u, y);
    if (stratify) acc[(r.x == 1 ? 4 : 8) + g].push(x, r.u, y);
  }
  return acc;
}

void check_required(const Accums& acc) {
  for (const auto& g : acc) {
    if (g.required && g.vars[0].count() == 0) {
      throw Error(ErrorCode::EmptyGroup, "group " + g.label + " is empty");
    }
  }
}

SummaryTable table_from(const Accums& acc, const SummaryMeta& meta) {
  check_required(acc);
  SummaryTable t;
  t.meta = meta;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& g : acc) {
    for (std::size_t v = 0; v < 3; ++v) {
      const RunningStats& s = g.vars[v];
      if (s.count() == 0) {
        t.rows.push_back({g.label, kVariables[v], nan, nan, 0});
      } else {
        t.rows.push_back({g.label, kVariables[v], s.mean(), s.sd(), s.count()});
      }
    }
  }
  return t;
}

void merge_into(Accums& into, const Accums& part) {
  for (std::size_t g = 0; g < into.size(); ++g) {
    for (std::size_t v = 0; v < 3; ++v) into[g].vars[v].merge(part[g].vars[v]);
  }
}

}  // namespace

const SummaryRow& SummaryTable::at(std::string_view group, std::string_view variable) const {
  for (const auto& r : rows) {
    if (r.group == group && r.variable == variable) return r;
  }
  throw Error(ErrorCode::UnknownName,
              "no summary row for (" + std::string(group) + ", " + std::string(variable) + ")");
}

std::string point_group_label(int z) { return "Z=" + std::to_string(z); }

std::string long_group_label(int z1, int z2) {
  return "Z1=" + std::to_string(z1) + ",Z2=" + std::to_string(z2);
}

std::string long_stratum_label(int z1, int z2, int x) {
  return long_group_label(z1, z2) + ",X=" + std::to_string(x);
}

SummaryTable group_summaries_point(const PointDataset& data) {
  const auto& p = data.provenance();
  return table_from(accumulate(data), {DgpKind::Point, p.gamma, p.replications, p.per_group, false,
                                       Pooling::Pooled});
}

SummaryTable group_summaries_long(const LongDataset& data, bool stratify_by_x) {
  const auto& p = data.provenance();
  return table_from(accumulate(data, stratify_by_x),
                    {DgpKind::Longitudinal, p.gamma, p.replications, p.per_group, stratify_by_x,
                     Pooling::Pooled});
}

SummaryTable replicate_summaries(const ReplicationConfig& config) {
  if (config.replications < 1) throw Error(ErrorCode::InvalidParameter, "replications must be >= 1");
  const RngState master = rng_new(config.master_seed);
  auto parts = parallel_map(config.replications, config.threads, [&](std::int64_t r) {
    RngState stream = rng_split(master, static_cast<std::uint64_t>(r));
    if (config.kind == DgpKind::Point) {
      return accumulate(quota_sample_point(stream, config.gamma, config.per_group));
    }
    return accumulate(quota_sample_long(stream, config.gamma, config.per_group), config.stratify);
  });

  const SummaryMeta meta{config.kind,
                         config.gamma,
                         config.replications,
                         config.per_group,
                         config.kind == DgpKind::Longitudinal && config.stratify,
                         config.pooling};

  if (config.pooling == Pooling::Pooled) {
    Accums total = parts.front();
    for (auto& g : total) g.vars = {};
    for (const auto& p : parts) merge_into(total, p);
    return table_from(total, meta);
  }

  for (const auto& p : parts) check_required(p);
  SummaryTable t = table_from(parts.front(), meta);
  std::size_t row = 0;
  for (std::size_t g = 0; g < parts.front().size(); ++g) {
    for (std::size_t v = 0; v < 3; ++v, ++row) {
      RunningStats means, sds;
      std::int64_t n = 0;
      for (const auto& p : parts) {
        const RunningStats& s = p[g].vars[v];
        if (s.count() == 0) continue;
        means.push(s.mean());
        sds.push(s.sd());
        n += s.count();
      }
      SummaryRow& r = t.rows[row];
      r.n = n;
      if (n > 0) {
        r.mean = means.mean();
        r.sd = sds.mean();
      }
    }
  }
  return t;
}

namespace {

std::size_t variable_index(std::string_view variable) {
  if (variable == "x") return 0;
  if (variable == "u") return 1;
  if (variable == "y") return 2;
  throw Error(ErrorCode::InvalidParameter, "unknown variable '" + std::string(variable) + "' (x|u|y)");
}

GapReport gaps_over(const std::vector<std::pair<std::string, double>>& means, std::string_view variable) {
  GapReport rep{std::string(variable), {}};
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      rep.gaps.push_back({means[i].first, means[j].first, means[i].second - means[j].second});
    }
  }
  return rep;
}

GapReport gaps_from_accums(const Accums& acc, std::size_t groups, std::string_view variable) {
  const std::size_t v = variable_index(variable);
  check_required(acc);
  std::vector<std::pair<std::string, double>> means;
  for (std::size_t g = 0; g < groups; ++g) means.emplace_back(acc[g].label, acc[g].vars[v].mean());
  return gaps_over(means, variable);
}

}  // namespace

GapReport exchangeability_gap(const PointDataset& data, std::string_view variable) {
  return gaps_from_accums(accumulate(data), 2, variable);
}

GapReport exchangeability_gap(const LongDataset& data, std::string_view variable) {
  return gaps_from_accums(accumulate(data, false), 4, variable);
}

GapReport exchangeability_gap(const SummaryTable& table, std::string_view variable) {
  variable_index(variable);
  std::vector<std::pair<std::string, double>> means;
  if (table.meta.kind == DgpKind::Point) {
    for (int z : {1, 0}) means.emplace_back(point_group_label(z), table.at(point_group_label(z), variable).mean);
  } else {
    for (const auto& [z1, z2] : kLongGroups) {
      means.emplace_back(long_group_label(z1, z2), table.at(long_group_label(z1, z2), variable).mean);
    }
  }
  return gaps_over(means, variable);
}

bool PositivityReport::any_flagged() const noexcept {
  for (const auto& s : strata) {
    if (s.flagged) return true;
  }
  return false;
}

PositivityReport positivity_check(std::span<const PointObs> data, int cap, std::int64_t min_count) {
  if (min_count < 1) throw Error(ErrorCode::InvalidParameter, "min_count must be >= 1");
  const StratumCounts counts = bin_x(data, cap);
  PositivityReport rep;
  rep.min_count = min_count;
  for (std::size_t b = 0; b < counts.num_bins(); ++b) {
    if (counts.bin_total(b) == 0) continue;
    PositivityStratum s{counts.label(b), counts.cell(b, 1).n, counts.cell(b, 0).n, false};
    s.flagged = std::min(s.n_treated, s.n_control) < min_count;
    rep.strata.push_back(s);
  }
  return rep;
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << "group,variable,mean,sd,n\n";
  for (const auto& r : table.rows) {
    out << '"' << r.group << "\"," << r.variable << ',';
    if (r.n > 0) out << format_double(r.mean) << ',' << format_double(r.sd);
    else out << ',';
    out << ',' << r.n << '\n';
  }
}

void write_summary_text(std::ostream& out, const SummaryTable& table) {
  const auto& m = table.meta;
  char buf[128];
  std::snprintf(buf, sizeof buf, "gamma = %g, %lld replication(s), %lld per group, %s\n", m.gamma,
                static_cast<long long>(m.replications), static_cast<long long>(m.per_group),
                m.pooling == Pooling::Pooled ? "pooled" : "mean of replicates");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-22s %18s %18s %18s\n", "Group", "X", "U", "Y");
  out << buf;

  std::string previous_block;
  for (std::size_t i = 0; i + 2 < table.rows.size(); i += 3) {
    const std::string& group = table.rows[i].group;
    const std::string block = group.substr(group.find(",X=") == std::string::npos ? group.size() : group.find(",X="));
    if (i > 0 && block != previous_block) out << '\n';
    previous_block = block;
    std::snprintf(buf, sizeof buf, "%-22s", group.c_str());
    out << buf;
    for (std::size_t v = 0; v < 3; ++v) {
      const SummaryRow& r = table.rows[i + v];
      if (r.n == 0) {
        std::snprintf(buf, sizeof buf, " %18s", "(empty)");
      } else {
        char cell[64];
        std::snprintf(cell, sizeof cell, "%.3f (%.3f)", r.mean, r.sd);
        std::snprintf(buf, sizeof buf, " %18s", cell);
      }
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace exch
