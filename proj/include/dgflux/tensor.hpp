#pragma once

#include "dgflux/basis.hpp"

namespace dgflux {

// Local face convention on the reference square, fixed everywhere:
//   0: xi1 = -1   1: xi1 = +1   2: xi2 = -1   3: xi2 = +1
// Face traversal runs along the ascending remaining coordinate. Nodal data
// is stored as (N+1)x(N+1) matrices with the xi1 index as the row.

inline Vector face_trace(const Eigen::Ref<const Matrix>& nodal, int face,
                         const NodalBasis& b) {
  switch (face) {
    case 0: return nodal.transpose() * b.ellMinus;
    case 1: return nodal.transpose() * b.ellPlus;
    case 2: return nodal * b.ellMinus;
    default: return nodal * b.ellPlus;
  }
}

// Accumulates flux ⊗ lhat into the element volume; any sign lives in `flux`.
inline void scatter_face(Eigen::Ref<Matrix> nodal, const Vector& flux,
                         int face, const NodalBasis& b) {
  switch (face) {
    case 0: nodal.noalias() += b.ellHatMinus * flux.transpose(); break;
    case 1: nodal.noalias() += b.ellHatPlus * flux.transpose(); break;
    case 2: nodal.noalias() += flux * b.ellHatMinus.transpose(); break;
    default: nodal.noalias() += flux * b.ellHatPlus.transpose(); break;
  }
}

}  // namespace dgflux
