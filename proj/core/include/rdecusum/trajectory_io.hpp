#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdecusum/detectors.hpp"

namespace rdecusum {

/// One row of the `detect` output: index,sampled,statistic,alarmed.
struct TrajectoryRow {
  std::int64_t index = 0;
  bool sampled = false;
  double statistic = 0.0;
  bool alarmed = false;
};

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in, const std::string& source);

struct TrajectoryViolation {
  std::size_t row;  // 0-based data row
  std::string message;
};

/// Re-checks a recorded trajectory against the detector invariants: the
/// statistic bounds, the sampling rule, the skip update and skip-run lengths,
/// and alarm placement.
std::vector<TrajectoryViolation> verify_trajectory(const std::vector<TrajectoryRow>& rows,
                                                   const PolicyParams& params);

}  // namespace rdecusum
