#pragma once

#include <cstdint>
#include <functional>

#include "dgflux/basis.hpp"
#include "dgflux/fields.hpp"
#include "dgflux/mesh.hpp"

namespace dgflux {

// Reference field in conserved variables, sampled at a physical point.
using FieldFunction = std::function<Vector(const Vector2&, Real)>;

struct ErrorNorms {
  Vector l2;    // sqrt of the J-weighted square integral per variable
  Vector linf;  // nodal max per variable
};

// Norms of (u - ref) measured with the solution's own quadrature.
ErrorNorms error_norms(const Mesh& mesh, const NodalBasis& basis, const StateVector& u,
                       const FieldFunction& ref, Real t);

// Same norms on a grid of twice the resolution: solution interpolated, the
// geometry re-evaluated from the mapping. Agreement with error_norms is the
// quadrature sufficiency check for smooth errors.
ErrorNorms error_norms_overintegrated(const Mesh& mesh, const NodalBasis& basis,
                                      const StateVector& u, const FieldFunction& ref,
                                      Real t);

// J-weighted integral of every variable: the conserved totals.
Vector conservation_totals(const Mesh& mesh, const NodalBasis& basis, const StateVector& u);

// One row of the run log, taken at an analysis time.
struct AnalysisRecord {
  Real time = 0.0;
  std::uint64_t step = 0;
  Real dt = 0.0;          // last step size
  Vector l2, linf;        // empty when the problem has no exact solution
  Vector totals;
  Real fvFraction = 0.0;
  Index switchedToFv = 0;  // switches since the previous record
  Index switchedToDg = 0;
};

}  // namespace dgflux
