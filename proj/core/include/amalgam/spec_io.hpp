#pragma once

#include "amalgam/diagnostics.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace amalgam::io {

using nlohmann::json;

/// A distribution spec as stored on disk: a table plus its kind.
struct SpecFile {
  SeriesKind kind = SeriesKind::cumulant;
  SeriesTable table;

  /// Throws ArgumentError when the file holds the other kind.
  JointCumulantSpec cumulants() const;
  JointMomentSpec moments() const;
};

std::string_view kind_name(SeriesKind kind);

/// Validates a parsed document. Errors name the offending entry.
SpecFile parse_spec(const json& doc);
SpecFile parse_spec_text(std::string_view text);
SpecFile load_spec(const std::filesystem::path& path);

/// Canonical document: dense coefficients, entries ordered by (order,
/// indices), zero maps omitted.
json spec_to_json(const SeriesTable& table, SeriesKind kind);
template <SeriesKind K>
json spec_to_json(const JointSeries<K>& spec) {
  return spec_to_json(spec, K);
}

/// Sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const json& doc);

json matrix_to_json(const BMatrix& m);
/// A square nested array of "p/q" strings.
BMatrix matrix_from_json(const json& doc);
BMatrix load_matrix(const std::filesystem::path& path);

/// Witness tuple as [n, [i_1..i_n]], witness args as 1-based [row, col].
json verdict_to_json(const Verdict& v);
std::string verdict_to_text(const Verdict& v);

json read_json_file(const std::filesystem::path& path);

}  // namespace amalgam::io
