#pragma once

#include <string>
#include <vector>

#include "rp/metrics.hpp"

namespace rp {

// Pr{Proper Action} vs epoch as a standalone SVG document. Output bytes are
// a pure function of the records. Throws std::invalid_argument on an empty
// record list.
std::string render_pr_proper_action_svg(const std::vector<MetricsRecord>& records,
                                        const std::string& title = "");

} // namespace rp
