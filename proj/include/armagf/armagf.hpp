#pragma once

// ARMA graph filter design by weighted least squares with an iterative
// second-order cone programming scheme, on the shifted Chebyshev basis.

#include "armagf/chebyshev.hpp"
#include "armagf/common.hpp"
#include "armagf/design_grid.hpp"
#include "armagf/designer.hpp"
#include "armagf/graph.hpp"
#include "armagf/socp.hpp"
#include "armagf/wls.hpp"

namespace armagf {
inline constexpr const char* kVersion = "0.1.0";
}
