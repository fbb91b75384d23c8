#pragma once

#include <string>
#include <vector>

#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"

namespace dgflux {

// Supersampled solution export: every DG element is evaluated on an
// (nVis+1)^2 equispaced grid through the interpolation matrix, FV elements
// are emitted as piecewise-constant subcell patches. Writes a legacy-ASCII
// VTK unstructured grid to `path` and the same samples to a sibling .csv.
// Derived quantities for the flow system: "p" (pressure), "s" (specific
// entropy ln(p/rho^gamma)), "omega" (vorticity from the BR1 gradients).
// Unknown names throw ConfigError.
template <class System>
void export_visualization(SpatialOperator<System>& op, const StateVector& u, Real t,
                          int nVis, const std::string& path,
                          const std::vector<std::string>& derived);

}  // namespace dgflux
