#include "dgflux/fields.hpp"

namespace dgflux {

namespace {
long gAllocations = 0;
}

StateVector::StateVector(Index nElements, int nVars, Index nodesPerDir)
    : nElements_(nElements),
      nVars_(nVars),
      nodes_(nodesPerDir),
      elementStride_(Index(nVars) * nodesPerDir * nodesPerDir),
      data_(nElements * Index(nVars) * nodesPerDir * nodesPerDir) {
  if (nElements < 0 || nVars < 1 || nodesPerDir < 1)
    throw DgError("state vector dimensions must be positive");
  data_.setZero();
  ++gAllocations;
}

Eigen::Map<Matrix> StateVector::var(Index elem, int v) {
  return {data_.data() + elem * elementStride_ + Index(v) * nodes_ * nodes_, nodes_, nodes_};
}

Eigen::Map<const Matrix> StateVector::var(Index elem, int v) const {
  return {data_.data() + elem * elementStride_ + Index(v) * nodes_ * nodes_, nodes_, nodes_};
}

long StateVector::allocation_count() { return gAllocations; }

void StateVector::reset_allocation_count() { gAllocations = 0; }

}  // namespace dgflux
