#pragma once

#include "dgflux/types.hpp"

namespace dgflux {

enum class NodeFamily { LegendreGauss, LegendreGaussLobatto };

constexpr int kMaxDegree = 15;

std::string to_string(NodeFamily family);

// Value and first derivative of the Legendre polynomial P_n at x.
struct LegendreEval {
  Real value;
  Real derivative;
};
LegendreEval legendre(int n, Real x);

// Interpolation nodes and quadrature weights on [-1,1], ascending nodes.
// Gauss: interior nodes, exact for degree 2N+1. Gauss-Lobatto: includes
// the endpoints, exact for degree 2N-1, requires N >= 1.
struct NodeSet {
  Vector nodes;
  Vector weights;
};
NodeSet build_nodes(int degree, NodeFamily family);

Vector barycentric_weights(const Vector& nodes);

// Lagrange cardinal polynomial l_j over `nodes`, evaluated at x.
Real lagrange_eval(const Vector& nodes, Index j, Real x);

// Rows evaluate the interpolant at `points`: (u at points) = M * (u at nodes).
Matrix build_interpolation_matrix(const Vector& nodes, const Vector& points);

// Collocation derivative, D_ij = l_j'(x_i).
Matrix build_diff_matrix(const Vector& nodes);

// Weak-form derivative projection, Dhat_ij = -(w_j/w_i) D_ji.
// Satisfies the summation-by-parts pairing w_i Dhat_ij = -w_j D_ji.
Matrix build_dhat(const Vector& nodes, const Vector& weights);

// Everything the solver needs for one 1D nodal basis.
struct NodalBasis {
  int degree = -1;
  NodeFamily family = NodeFamily::LegendreGaussLobatto;
  Vector nodes;
  Vector weights;
  Vector baryWeights;
  Matrix diff;     // D
  Matrix diffHat;  // Dhat
  Vector ellMinus, ellPlus;        // l_i(-1), l_i(+1)
  Vector ellHatMinus, ellHatPlus;  // l_i(-1)/w_i, l_i(+1)/w_i

  Index count() const { return nodes.size(); }
};
NodalBasis build_basis(int degree, NodeFamily family);

// Non-conforming (2:1) edge coupling operators. IL/IU interpolate a parent
// face polynomial to the lower/upper child nodes; PL/PU project child data
// back. Built so that PL*IL + PU*IU = I for both node families.
struct MortarMatrices {
  Matrix toLower, toUpper;      // IL, IU
  Matrix fromLower, fromUpper;  // PL, PU
};
MortarMatrices build_mortar_matrices(const NodalBasis& basis);

// Transfer between the nodal polynomial and N+1 equal-width subcell means.
// Row k of dgToFv takes the mean of the interpolant over subcell k.
struct FvVandermonde {
  Real subcellWidth = 0;  // w = 2/(N+1)
  Matrix dgToFv;
  Matrix fvToDg;  // exact inverse of dgToFv (LU)
  Real conditionNumber = 0;
};
FvVandermonde build_fv_vandermonde(const NodalBasis& basis);

}  // namespace dgflux
