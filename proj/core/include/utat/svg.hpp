#pragma once

#include <string>

#include "utat/disagg.hpp"

namespace utat::svg {

/// Renders the marginal value function of measure k / criterion j as a
/// staircase step-plot with breakpoint tick labels.  `normalized` divides by
/// the function's top value (flat-zero functions stay at zero).  The output
/// is a pure function of the model: identical models produce byte-identical
/// SVG.
std::string render_marginal(const disagg::ValueModel& model, int k, int j, bool normalized);

}  // namespace utat::svg
