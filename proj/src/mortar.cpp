#include "dgflux/mortar.hpp"

namespace dgflux {

Matrix mortar_to_child(const MortarMatrices& mm, MortarRole child, const Matrix& parentTrace) {
  switch (child) {
    case MortarRole::LowerChild:
      return parentTrace * mm.toLower.transpose();
    case MortarRole::UpperChild:
      return parentTrace * mm.toUpper.transpose();
    default:
      throw DgError("mortar interpolation requires a child role");
  }
}

Matrix mortar_project(const MortarMatrices& mm, const Matrix& lowerFlux,
                      const Matrix& upperFlux) {
  return lowerFlux * mm.fromLower.transpose() + upperFlux * mm.fromUpper.transpose();
}

}  // namespace dgflux
