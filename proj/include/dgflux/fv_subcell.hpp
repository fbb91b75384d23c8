#pragma once

#include "dgflux/basis.hpp"
#include "dgflux/dg_operator.hpp"
#include "dgflux/mesh.hpp"
#include "dgflux/types.hpp"

namespace dgflux {

// Zero at sign changes, otherwise the argument of smaller magnitude.
Real minmod(Real a, Real b);

Real limited_slope(SlopeLimiter limiter, Real left, Real right);

// Jacobian-weighted transfer between nodal polynomials and subcell means:
// means = dgToFv (J o u) dgToFv^T / jbar and its exact inverse. The pair
// conserves the metric-weighted integral on curved elements and reduces to
// the plain tensor-product transfer when J is constant.
Matrix dg_to_fv(const FvVandermonde& fvv, const Eigen::Ref<const Matrix>& nodal,
                const Eigen::Ref<const Matrix>& jNodal, const Matrix& jbar);
Matrix fv_to_dg(const FvVandermonde& fvv, const Eigen::Ref<const Matrix>& means,
                const Eigen::Ref<const Matrix>& jNodal, const Matrix& jbar);

// Subcell means of J and exact integrals of the metric terms over the inner
// subcell faces, all taken from the degree-N interpolants. Integrating the
// interpolated metric (rather than sampling it) keeps the subcell faces
// watertight, so a constant state produces an exactly zero FV residual.
SubcellGeometry build_subcell_geometry(const NodalBasis& basis, const FvVandermonde& fvv,
                                       const Element& elem);

}  // namespace dgflux
