#include "dgflux/basis.hpp"

#include <cmath>
#include <limits>

namespace dgflux {

namespace {

constexpr Real kPi = 3.14159265358979323846;

void check_degree(int degree, NodeFamily family) {
  if (degree < 0 || degree > kMaxDegree)
    throw DgError("basis degree " + std::to_string(degree) + " outside [0," +
                  std::to_string(kMaxDegree) + "]");
  if (degree == 0 && family == NodeFamily::LegendreGaussLobatto)
    throw DgError("Gauss-Lobatto needs degree >= 1");
}

// Newton refinement of an initial guess toward a root of f. The iteration is
// fixed-tolerance and deterministic so repeated builds are bitwise identical.
template <typename F>
Real newton_root(Real x, F&& f) {
  constexpr Real tol = 4.0 * std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < 10; ++it) {
    auto [value, slope] = f(x);
    const Real dx = -value / slope;
    x += dx;
    if (std::abs(dx) <= tol * std::max(Real(1), std::abs(x))) break;
  }
  return x;
}

}  // namespace

std::string to_string(NodeFamily family) {
  return family == NodeFamily::LegendreGauss ? "LG" : "LGL";
}

LegendreEval legendre(int n, Real x) {
  if (n == 0) return {1.0, 0.0};
  Real pm = 1.0, p = x;        // P_{k-1}, P_k
  Real dpm = 0.0, dp = 1.0;    // derivatives
  for (int k = 1; k < n; ++k) {
    const Real pn = ((2 * k + 1) * x * p - k * pm) / (k + 1);
    const Real dpn = dpm + (2 * k + 1) * p;
    pm = p;
    p = pn;
    dpm = dp;
    dp = dpn;
  }
  return {p, dp};
}

NodeSet build_nodes(int degree, NodeFamily family) {
  check_degree(degree, family);
  const int n = degree + 1;
  NodeSet out;
  out.nodes.resize(n);
  out.weights.resize(n);

  if (family == NodeFamily::LegendreGauss) {
    // roots of P_{N+1}; Chebyshev initial guesses, mirrored for symmetry
    for (int i = 0; i < n / 2 + n % 2; ++i) {
      Real x0 = -std::cos(kPi * (2 * i + 1) / (2 * n));
      const Real x = newton_root(x0, [n](Real x) {
        auto e = legendre(n, x);
        return std::pair<Real, Real>{e.value, e.derivative};
      });
      out.nodes[i] = x;
      out.nodes[n - 1 - i] = -x;
    }
    if (n % 2 == 1) out.nodes[n / 2] = 0.0;
    for (int i = 0; i < n; ++i) {
      const Real x = out.nodes[i];
      const Real dp = legendre(n, x).derivative;
      out.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  } else {
    // endpoints plus roots of P_N'
    out.nodes[0] = -1.0;
    out.nodes[degree] = 1.0;
    for (int i = 1; i <= (degree - 1) / 2 + (degree - 1) % 2; ++i) {
      Real x0 = -std::cos(kPi * i / degree);
      const Real x = newton_root(x0, [degree](Real x) {
        auto e = legendre(degree, x);
        // Legendre ODE: (1-x^2) P'' = 2x P' - N(N+1) P
        const Real second =
            (2.0 * x * e.derivative - degree * (degree + 1) * e.value) /
            (1.0 - x * x);
        return std::pair<Real, Real>{e.derivative, second};
      });
      out.nodes[i] = x;
      out.nodes[degree - i] = -x;
    }
    if (degree % 2 == 0 && degree > 0) out.nodes[degree / 2] = 0.0;
    for (int i = 0; i < n; ++i) {
      const Real p = legendre(degree, out.nodes[i]).value;
      out.weights[i] = 2.0 / (degree * (degree + 1) * p * p);
    }
  }
  return out;
}

Vector barycentric_weights(const Vector& nodes) {
  const Index n = nodes.size();
  Vector w = Vector::Ones(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j) w[j] *= nodes[j] - nodes[i];
  return w.cwiseInverse();
}

Real lagrange_eval(const Vector& nodes, Index j, Real x) {
  const Index n = nodes.size();
  for (Index i = 0; i < n; ++i)
    if (x == nodes[i]) return i == j ? 1.0 : 0.0;
  const Vector bw = barycentric_weights(nodes);
  Real num = bw[j] / (x - nodes[j]);
  Real den = 0.0;
  for (Index i = 0; i < n; ++i) den += bw[i] / (x - nodes[i]);
  return num / den;
}

Matrix build_interpolation_matrix(const Vector& nodes, const Vector& points) {
  const Index n = nodes.size();
  const Index m = points.size();
  const Vector bw = barycentric_weights(nodes);
  Matrix out = Matrix::Zero(m, n);
  for (Index p = 0; p < m; ++p) {
    const Real x = points[p];
    Index hit = -1;
    for (Index i = 0; i < n; ++i)
      if (x == nodes[i]) hit = i;
    if (hit >= 0) {
      out(p, hit) = 1.0;
      continue;
    }
    Real den = 0.0;
    for (Index i = 0; i < n; ++i) {
      out(p, i) = bw[i] / (x - nodes[i]);
      den += out(p, i);
    }
    out.row(p) /= den;
  }
  return out;
}

Matrix build_diff_matrix(const Vector& nodes) {
  const Index n = nodes.size();
  const Vector bw = barycentric_weights(nodes);
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    Real diag = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;  // negative-sum trick keeps rows of constants exact
  }
  return d;
}

Matrix build_dhat(const Vector& nodes, const Vector& weights) {
  const Matrix d = build_diff_matrix(nodes);
  const Index n = nodes.size();
  Matrix dhat(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      dhat(i, j) = -(weights[j] / weights[i]) * d(j, i);
  return dhat;
}

NodalBasis build_basis(int degree, NodeFamily family) {
  NodalBasis b;
  b.degree = degree;
  b.family = family;
  auto ns = build_nodes(degree, family);
  b.nodes = ns.nodes;
  b.weights = ns.weights;
  b.baryWeights = barycentric_weights(b.nodes);
  b.diff = build_diff_matrix(b.nodes);
  b.diffHat = build_dhat(b.nodes, b.weights);
  const Index n = b.count();
  b.ellMinus.resize(n);
  b.ellPlus.resize(n);
  for (Index i = 0; i < n; ++i) {
    b.ellMinus[i] = lagrange_eval(b.nodes, i, -1.0);
    b.ellPlus[i] = lagrange_eval(b.nodes, i, 1.0);
  }
  b.ellHatMinus = b.ellMinus.cwiseQuotient(b.weights);
  b.ellHatPlus = b.ellPlus.cwiseQuotient(b.weights);
  return b;
}

MortarMatrices build_mortar_matrices(const NodalBasis& basis) {
  const Index n = basis.count();
  // child node positions expressed in the parent coordinate
  const Vector lowerPts = ((basis.nodes.array() - 1.0) / 2.0).matrix();
  const Vector upperPts = ((basis.nodes.array() + 1.0) / 2.0).matrix();

  MortarMatrices m;
  m.toLower = build_interpolation_matrix(basis.nodes, lowerPts);
  m.toUpper = build_interpolation_matrix(basis.nodes, upperPts);

  // L2 projection child -> parent, assembled with Gauss quadrature so the
  // round trip PL*IL + PU*IU = I holds for Lobatto nodes as well.
  const NodeSet gauss = build_nodes(basis.degree, NodeFamily::LegendreGauss);
  const Matrix atGauss = build_interpolation_matrix(basis.nodes, gauss.nodes);
  const Matrix mass =
      atGauss.transpose() * gauss.weights.asDiagonal() * atGauss;

  const Vector gaussLower = ((gauss.nodes.array() - 1.0) / 2.0).matrix();
  const Vector gaussUpper = ((gauss.nodes.array() + 1.0) / 2.0).matrix();
  const Matrix parentAtLower =
      build_interpolation_matrix(basis.nodes, gaussLower);
  const Matrix parentAtUpper =
      build_interpolation_matrix(basis.nodes, gaussUpper);
  // G^L_ia = int l_a(z) l_i((z-1)/2) dz, child integrand degree 2N
  const Matrix gl =
      parentAtLower.transpose() * gauss.weights.asDiagonal() * atGauss;
  const Matrix gu =
      parentAtUpper.transpose() * gauss.weights.asDiagonal() * atGauss;

  Eigen::PartialPivLU<Matrix> lu(mass);
  m.fromLower = 0.5 * lu.solve(gl);
  m.fromUpper = 0.5 * lu.solve(gu);
  return m;
}

FvVandermonde build_fv_vandermonde(const NodalBasis& basis) {
  const Index n = basis.count();
  FvVandermonde v;
  v.subcellWidth = 2.0 / static_cast<Real>(n);
  const NodeSet gauss = build_nodes(basis.degree, NodeFamily::LegendreGauss);
  v.dgToFv.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Real left = -1.0 + k * v.subcellWidth;
    Vector pts(n);
    for (Index q = 0; q < n; ++q)
      pts[q] = left + v.subcellWidth * (gauss.nodes[q] + 1.0) / 2.0;
    const Matrix interp = build_interpolation_matrix(basis.nodes, pts);
    // subcell mean = (1/2) sum_q w_q u(xi_q); the w/2 Jacobian of the
    // subcell map and the 1/w mean normalization cancel
    v.dgToFv.row(k) = 0.5 * gauss.weights.transpose() * interp;
  }
  Eigen::PartialPivLU<Matrix> lu(v.dgToFv);
  v.fvToDg = lu.solve(Matrix::Identity(n, n));
  const Eigen::JacobiSVD<Matrix> svd(v.dgToFv);
  v.conditionNumber =
      svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
  return v;
}

}  // namespace dgflux
