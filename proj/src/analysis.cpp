#include "dgflux/analysis.hpp"

#include <cmath>

namespace dgflux {

namespace {

ErrorNorms norms_on_grid(const Mesh& mesh, const NodalBasis& quadBasis,
                         const std::vector<Matrix>& values, int nVars,
                         const FieldFunction& ref, Real t) {
  const Index n = quadBasis.count();
  ErrorNorms norms;
  norms.l2 = Vector::Zero(nVars);
  norms.linf = Vector::Zero(nVars);
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Index node = j * n + i;
        const Vector exact = ref(Vector2(el.xNodes.col(node)), t);
        const Real wj = quadBasis.weights[i] * quadBasis.weights[j] * el.jac[node];
        for (int v = 0; v < nVars; ++v) {
          const Real d = values[e * nVars + v](i, j) - exact[v];
          norms.l2[v] += wj * d * d;
          norms.linf[v] = std::max(norms.linf[v], std::abs(d));
        }
      }
  }
  norms.l2 = norms.l2.cwiseSqrt();
  return norms;
}

}  // namespace

ErrorNorms error_norms(const Mesh& mesh, const NodalBasis& basis, const StateVector& u,
                       const FieldFunction& ref, Real t) {
  const int nVars = u.n_vars();
  std::vector<Matrix> values(mesh.n_elements() * nVars);
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (int v = 0; v < nVars; ++v) values[e * nVars + v] = u.var(e, v);
  return norms_on_grid(mesh, basis, values, nVars, ref, t);
}

ErrorNorms error_norms_overintegrated(const Mesh& mesh, const NodalBasis& basis,
                                      const StateVector& u, const FieldFunction& ref,
                                      Real t) {
  const NodalBasis fine = build_basis(2 * basis.degree + 1, basis.family);
  const Matrix interp = build_interpolation_matrix(basis.nodes, fine.nodes);
  Mesh refined = mesh;
  compute_metrics(refined, fine);

  const int nVars = u.n_vars();
  std::vector<Matrix> values(mesh.n_elements() * nVars);
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (int v = 0; v < nVars; ++v)
      values[e * nVars + v] = interp * u.var(e, v).eval() * interp.transpose();
  return norms_on_grid(refined, fine, values, nVars, ref, t);
}

Vector conservation_totals(const Mesh& mesh, const NodalBasis& basis, const StateVector& u) {
  const Index n = basis.count();
  Vector totals = Vector::Zero(u.n_vars());
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    for (int v = 0; v < u.n_vars(); ++v) {
      const auto m = u.var(e, v);
      Real sum = 0.0;
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          sum += basis.weights[i] * basis.weights[j] * el.jac[j * n + i] * m(i, j);
      totals[v] += sum;
    }
  }
  return totals;
}

}  // namespace dgflux
