#include "rdecusum/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

#include <fmt/format.h>

#include "rdecusum/errors.hpp"
#include "rdecusum/random.hpp"

namespace rdecusum {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::vector<SeriesRecord> parse_series_csv(std::istream& in, const std::string& source,
                                           const ColumnSpec& columns) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw ParseError(source, 1, "missing header row");
  }
  const auto header = split_fields(line);
  std::size_t index_col = header.size();
  std::size_t value_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == columns.index) index_col = i;
    if (trim(header[i]) == columns.value) value_col = i;
  }
  if (index_col == header.size()) throw ParseError(source, 1, fmt::format("no column '{}'", columns.index));
  if (value_col == header.size()) throw ParseError(source, 1, fmt::format("no column '{}'", columns.value));

  std::vector<SeriesRecord> out;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) throw ParseError(source, line_no, "blank row");
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(source, line_no,
                       fmt::format("expected {} fields, found {}", header.size(), fields.size()));
    }
    SeriesRecord rec;
    if (!parse_number(fields[index_col], rec.index)) {
      throw ParseError(source, line_no, fmt::format("index '{}' is not an integer", fields[index_col]));
    }
    if (!parse_number(fields[value_col], rec.value) || !std::isfinite(rec.value)) {
      throw ParseError(source, line_no, fmt::format("value '{}' is not a number", fields[value_col]));
    }
    if (rec.value < 0.0) throw ParseError(source, line_no, "count values must be nonnegative");
    if (!out.empty() && rec.index <= out.back().index) {
      throw ParseError(source, line_no, "index is not strictly increasing");
    }
    out.push_back(rec);
  }
  if (out.empty()) throw ParseError(source, 0, "no data rows");
  return out;
}

std::vector<SeriesRecord> ingest_csv(const std::filesystem::path& path, const ColumnSpec& columns) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_series_csv(in, path.string(), columns);
}

void emit_series_csv(std::ostream& out, const std::vector<SeriesRecord>& series,
                     const ColumnSpec& columns) {
  out << columns.index << ',' << columns.value << '\n';
  for (const auto& r : series) out << r.index << ',' << format_real(r.value) << '\n';
}

std::vector<SeriesRecord> add_poisson_noise(const std::vector<SeriesRecord>& series, double rate,
                                            std::uint64_t seed) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidInput("noise rate must be positive");
  Engine engine = make_engine(seed, 0, streams::kNoise);
  std::poisson_distribution<std::int64_t> noise(rate);
  auto out = series;
  for (auto& r : out) r.value += static_cast<double>(noise(engine));
  return out;
}

std::string format_real(double value) {
  // Integers print without a fraction; everything else round-trips.
  if (value == std::floor(value) && std::abs(value) < 1e15) return fmt::format("{:.0f}", value);
  return fmt::format("{:.17g}", value);
}

}  // namespace rdecusum
