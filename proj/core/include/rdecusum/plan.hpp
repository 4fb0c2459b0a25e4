#pragma once

#include <string>
#include <string_view>

#include "rdecusum/evaluation.hpp"

namespace rdecusum {

enum class PlanMode {
  Evaluate,  // one operating point per detector (`operating_point`)
  Sweep,     // a threshold or target-FAR grid (`grid`)
};

/// Parses an evaluation/sweep recipe (YAML). The schema is documented in
/// configs/README.md; violations throw SchemaError naming the key path,
/// e.g. `detectors[1].mu`.
SweepPlan parse_plan(std::string_view text, PlanMode mode, const std::string& source = "<config>");

}  // namespace rdecusum
