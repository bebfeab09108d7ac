#include "exch/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "exch/error.hpp"

namespace exch {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const PointDataset& data) {
  out << "x,z,y,u\n";
  for (const auto& r : data.records()) {
    out << r.x << ',' << r.z << ',' << r.y << ',' << format_double(r.u) << '\n';
  }
}

void write_csv(std::ostream& out, const LongDataset& data) {
  out << "z1,x,z2,y,u\n";
  for (const auto& r : data.records()) {
    out << r.z1 << ',' << r.x << ',' << r.z2 << ',' << r.y << ',' << format_double(r.u) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_line(std::size_t lineno, const std::string& why) {
  throw Error(ErrorCode::ParseError, "csv line " + std::to_string(lineno) + ": " + why);
}

std::int64_t parse_int(std::string_view s, std::size_t lineno) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad_line(lineno, "bad integer '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, std::size_t lineno) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) bad_line(lineno, "bad real '" + tmp + "'");
  return v;
}

int parse_binary(std::string_view s, std::size_t lineno) {
  const auto v = parse_int(s, lineno);
  if (v != 0 && v != 1) bad_line(lineno, "expected 0 or 1, got '" + std::string(s) + "'");
  return static_cast<int>(v);
}

}  // namespace

AnyDataset read_csv(std::istream& in, const Provenance& provenance) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Provenance prov = provenance;
  std::size_t lineno = 1;

  auto next_fields = [&](std::size_t expected) -> std::vector<std::string_view> {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto f = split_fields(line);
    if (f.size() != expected) bad_line(lineno, "expected " + std::to_string(expected) + " fields");
    return f;
  };

  if (line == "x,z,y,u") {
    prov.kind = DgpKind::Point;
    std::vector<PointRecord> recs;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto f = next_fields(4);
      PointRecord r{parse_int(f[0], lineno), parse_binary(f[1], lineno), parse_int(f[2], lineno),
                    parse_real(f[3], lineno)};
      if (r.x < 0 || r.y < 0) bad_line(lineno, "counts must be nonnegative");
      recs.push_back(r);
    }
    return PointDataset(std::move(recs), prov);
  }
  if (line == "z1,x,z2,y,u") {
    prov.kind = DgpKind::Longitudinal;
    std::vector<LongRecord> recs;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto f = next_fields(5);
      LongRecord r{parse_binary(f[0], lineno), parse_binary(f[1], lineno), parse_binary(f[2], lineno),
                   parse_int(f[3], lineno), parse_real(f[4], lineno)};
      if (r.y < 0) bad_line(lineno, "counts must be nonnegative");
      recs.push_back(r);
    }
    return LongDataset(std::move(recs), prov);
  }
  throw Error(ErrorCode::ParseError, "unrecognized csv header '" + line + "'");
}

nlohmann::json provenance_to_json(const Provenance& p) {
  return {{"dgp", to_string(p.kind)},
          {"regime", to_string(p.regime)},
          {"gamma", p.gamma},
          {"master_seed", p.master_seed},
          {"stream_index", p.stream_index},
          {"per_group", p.per_group},
          {"replications", p.replications}};
}

Provenance provenance_from_json(const nlohmann::json& j) {
  try {
    Provenance p;
    p.kind = parse_dgp_kind(j.at("dgp").get<std::string>());
    p.regime = j.at("regime").get<std::string>() == "E" ? Regime::Experimental : Regime::Observational;
    p.gamma = j.at("gamma").get<double>();
    p.master_seed = j.at("master_seed").get<std::uint64_t>();
    p.stream_index = j.at("stream_index").get<std::uint64_t>();
    p.per_group = j.at("per_group").get<std::int64_t>();
    p.replications = j.value("replications", std::int64_t{1});
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("provenance: ") + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".json");
}

AnyDataset load_dataset(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + csv.string() + "'");
  Provenance prov;
  if (std::ifstream side(sidecar_path(csv)); side) {
    nlohmann::json j;
    try {
      side >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("sidecar: ") + e.what());
    }
    prov = provenance_from_json(j.contains("dataset") ? j.at("dataset") : j);
  }
  return read_csv(in, prov);
}

}  // namespace exch
