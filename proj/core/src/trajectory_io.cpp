#include "rdecusum/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "rdecusum/errors.hpp"
#include "rdecusum/series.hpp"

namespace rdecusum {
namespace {

constexpr std::string_view kHeader = "index,sampled,statistic,alarmed";

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_flag(std::string_view text, bool& out) {
  if (text == "0") return out = false, true;
  if (text == "1") return out = true, true;
  return false;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{}\n", r.index, r.sampled ? 1 : 0, format_real(r.statistic),
                       r.alarmed ? 1 : 0);
  }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError(source, 1, fmt::format("expected header '{}'", kHeader));
  std::vector<TrajectoryRow> rows;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(source, line_no, "blank row");
    const auto f = split(line);
    if (f.size() != 4) throw ParseError(source, line_no, fmt::format("expected 4 fields, found {}", f.size()));
    TrajectoryRow r;
    if (!parse_number(f[0], r.index)) throw ParseError(source, line_no, "index is not an integer");
    if (!parse_flag(f[1], r.sampled)) throw ParseError(source, line_no, "sampled must be 0 or 1");
    if (!parse_number(f[2], r.statistic) || !std::isfinite(r.statistic)) {
      throw ParseError(source, line_no, "statistic is not a finite number");
    }
    if (!parse_flag(f[3], r.alarmed)) throw ParseError(source, line_no, "alarmed must be 0 or 1");
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrajectoryViolation> verify_trajectory(const std::vector<TrajectoryRow>& rows,
                                                   const PolicyParams& params) {
  params.validate();
  std::vector<TrajectoryViolation> out;
  auto flag = [&](std::size_t i, std::string msg) { out.push_back({i, std::move(msg)}); };

  const bool rde = params.kind == DetectorKind::RdeCusum;
  const bool coin = params.kind == DetectorKind::FractionalSampling;
  const double floor = rde ? 0.0 - params.h : 0.0;

  double prev = 0.0;
  // Skip run in progress: the undershoot that started it and its length so far.
  double run_start = 0.0;
  std::uint64_t run_length = 0;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i > 0 && r.index <= rows[i - 1].index) flag(i, "index is not strictly increasing");
    if (i > 0 && rows[i - 1].alarmed) {
      flag(i, "row after alarm");
      break;
    }
    if (r.statistic < floor) flag(i, fmt::format("statistic {} below floor {}", r.statistic, floor));
    if (r.alarmed != (r.statistic >= params.threshold)) {
      flag(i, r.alarmed ? "alarm raised below threshold" : "threshold crossed without alarm");
    }

    if (!coin) {
      const bool should_sample = prev >= 0.0;
      if (r.sampled != should_sample) {
        flag(i, should_sample ? "skipped while statistic was nonnegative"
                              : "sampled while statistic was negative");
      }
    } else if (i == 0 && !r.sampled) {
      flag(i, "first observation must be sampled");
    }

    if (!r.sampled) {
      const double expected = rde ? std::min(prev + params.mu, 0.0) : prev;
      if (r.statistic != expected) {
        flag(i, fmt::format("skip update gave {}, expected {}", r.statistic, expected));
      }
      if (run_length == 0) run_start = -prev;
      ++run_length;
    }
    if (r.sampled || i + 1 == rows.size()) {
      // A completed skip run lasts ceil(u / mu) steps; repeated addition of mu
      // may land one step either side when u / mu is within rounding of an integer.
      if (rde && run_length > 0 && r.sampled) {
        const double nominal = std::ceil(run_start / params.mu);
        const double got = static_cast<double>(run_length);
        if (std::abs(got - nominal) > 1.0) {
          flag(i, fmt::format("skip run of {} steps, expected {}", run_length, nominal));
        }
      }
      if (r.sampled) run_length = 0;
    }
    prev = r.statistic;
  }
  return out;
}

}  // namespace rdecusum
