#pragma once

#include "dgflux/basis.hpp"
#include "dgflux/mesh.hpp"

namespace dgflux {

// Runtime half of the 2:1 non-conforming coupling. Traces live as k x (N+1)
// matrices whose columns follow the parent-face parametrization; the lower
// child covers the parent interval [-1, 0].

// Restrict a parent-face trace to one child interval.
Matrix mortar_to_child(const MortarMatrices& mm, MortarRole child, const Matrix& parentTrace);

// Combine the two child fluxes (already scaled by the child surface element)
// into the parent-face flux. The projection carries the half weight of the
// parent-to-child measure ratio, so sum(w f_parent) = 0.5 sum(w f_L) +
// 0.5 sum(w f_U) holds discretely.
Matrix mortar_project(const MortarMatrices& mm, const Matrix& lowerFlux,
                      const Matrix& upperFlux);

}  // namespace dgflux
