#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dgflux {

using Real = double;
using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;
using IndexVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

// Conserved/primitive state of one node. Capped at 4 entries (scalar or 2D
// compressible flow) so hot loops stay allocation-free.
using StateVec = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;
// Cartesian flux of one node, one column per space direction.
using FluxMat = Eigen::Matrix<Real, Eigen::Dynamic, 2, Eigen::ColMajor, 4, 2>;

struct DgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : DgError {
  using DgError::DgError;
};

struct IoError : DgError {
  using DgError::DgError;
};

struct NonPhysicalState : DgError {
  using DgError::DgError;
};

// Initial data whose exact Riemann solution opens a vacuum region.
struct VacuumGenerated : DgError {
  using DgError::DgError;
};

}  // namespace dgflux
