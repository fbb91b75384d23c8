#pragma once

#include <array>

#include "dgflux/basis.hpp"
#include "dgflux/equations.hpp"
#include "dgflux/mesh.hpp"

namespace dgflux {

// One BR1 gradient component on one element. qNodal holds one lifted variable
// as an (N+1) x (N+1) nodal matrix; faceFlux[f] holds q* ntilde_d shat at the
// face nodes of local face f, oriented outward and in the element's own face
// order. direction selects the physical derivative (0: x, 1: y).
//
// The lifted gradient shares the weak divergence stencil of the main operator
// but with a positive sign: g_d = +(1/J)[Dhat contributions + face scatter].
Matrix br1_gradient(const NodalBasis& basis, const Element& elem, int direction,
                    const Matrix& qNodal, const std::array<Vector, 4>& faceFlux);

// Interface viscous flux: arithmetic mean of the one-sided viscous fluxes
// contracted with the unit normal.
template <class System>
typename System::State viscous_surface_flux(const System& eq, const typename System::State& uL,
                                            const typename System::State& uR,
                                            const typename System::LiftGrad& gL,
                                            const typename System::LiftGrad& gR,
                                            const Vector2& nhat) {
  const auto mean = (0.5 * (viscous_flux(eq, uL, gL) + viscous_flux(eq, uR, gR))).eval();
  return mean.col(0) * nhat.x() + mean.col(1) * nhat.y();
}

}  // namespace dgflux
