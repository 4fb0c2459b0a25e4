#pragma once

#include <iosfwd>
#include <vector>

#include "rdecusum/evaluation.hpp"

namespace rdecusum {

/// Operating-characteristic table, one line per OcRow. Optional metrics that
/// were not computed are left empty; CI columns are 95% half-widths.
void write_oc_csv(std::ostream& out, const std::vector<OcRow>& rows);

}  // namespace rdecusum
