#pragma once

#include "dgflux/types.hpp"

namespace dgflux {

// Nodal solution storage for all elements: one contiguous buffer, element
// blocks in mesh (space-filling curve) order, variables contiguous within an
// element, xi1 fastest within a variable. Views are Eigen maps, so element
// and variable slices compose with expressions without copying.
//
// Buffer acquisitions are counted globally; the time integrator's fixed
// working-set guarantee is asserted against that counter.
class StateVector {
 public:
  StateVector() = default;
  StateVector(Index nElements, int nVars, Index nodesPerDir);

  Index n_elements() const { return nElements_; }
  int n_vars() const { return nVars_; }
  Index nodes_per_dir() const { return nodes_; }
  Index size() const { return data_.size(); }

  // (N+1) x (N+1) nodal view of one variable of one element; entry (i, j)
  // is the node at (xi1_i, xi2_j).
  Eigen::Map<Matrix> var(Index elem, int v);
  Eigen::Map<const Matrix> var(Index elem, int v) const;

  // Flat views, for whole-field axpy updates and serialization.
  Eigen::Map<Vector> flat() { return {data_.data(), data_.size()}; }
  Eigen::Map<const Vector> flat() const { return {data_.data(), data_.size()}; }

  Real* element_data(Index elem) { return data_.data() + elem * elementStride_; }
  const Real* element_data(Index elem) const { return data_.data() + elem * elementStride_; }
  Index element_stride() const { return elementStride_; }

  static long allocation_count();
  static void reset_allocation_count();

 private:
  Index nElements_ = 0;
  int nVars_ = 0;
  Index nodes_ = 0;
  Index elementStride_ = 0;
  Vector data_;
};

}  // namespace dgflux
