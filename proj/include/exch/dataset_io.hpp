#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "json.hpp"

#include "exch/dgp.hpp"

namespace exch {

/// Formats a double with 17 significant digits ("%.17g"); round-trips exactly.
std::string format_double(double v);

// CSV layout: header row, then one record per line.
//   point:        x,z,y,u
//   longitudinal: z1,x,z2,y,u
void write_csv(std::ostream& out, const PointDataset& data);
void write_csv(std::ostream& out, const LongDataset& data);

using AnyDataset = std::variant<PointDataset, LongDataset>;

/// Reads either layout, chosen by the header. The provenance is taken from
/// `provenance` (kind is overwritten from the header). Throws parse-error.
AnyDataset read_csv(std::istream& in, const Provenance& provenance = {});

nlohmann::json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

/// Sidecar path for a data file: "<path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Loads a dataset CSV and, when present, its provenance sidecar.
AnyDataset load_dataset(const std::filesystem::path& csv);

}  // namespace exch
