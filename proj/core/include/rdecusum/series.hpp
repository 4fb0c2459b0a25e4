#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdecusum {

/// One day of a count series.
struct SeriesRecord {
  std::int64_t index = 0;
  double value = 0.0;

  friend bool operator==(const SeriesRecord&, const SeriesRecord&) = default;
};

struct ColumnSpec {
  std::string index = "index";
  std::string value = "value";
};

/// Parses a header-first CSV; extra columns are ignored. Rejects blank or
/// malformed rows, non-numeric cells, negative values and indices that are
/// not strictly increasing, reporting the offending line.
std::vector<SeriesRecord> ingest_csv(const std::filesystem::path& path, const ColumnSpec& columns = {});
std::vector<SeriesRecord> parse_series_csv(std::istream& in, const std::string& source,
                                           const ColumnSpec& columns = {});

/// Writes `index,value` with the given column names.
void emit_series_csv(std::ostream& out, const std::vector<SeriesRecord>& series,
                     const ColumnSpec& columns = {});

/// value_i + Pois(rate) draws, one independent draw per record from a stream
/// derived from `seed`.
std::vector<SeriesRecord> add_poisson_noise(const std::vector<SeriesRecord>& series, double rate,
                                            std::uint64_t seed);

/// Shortest text with 17 significant digits, the CSV float format.
std::string format_real(double value);

}  // namespace rdecusum
