#include "dgflux/lifting.hpp"

#include "dgflux/tensor.hpp"

namespace dgflux {

Matrix br1_gradient(const NodalBasis& basis, const Element& elem, int direction,
                    const Matrix& qNodal, const std::array<Vector, 4>& faceFlux) {
  const Index n = basis.count();
  const int base = direction;  // metric rows: 0 Ja1_x, 1 Ja1_y, 2 Ja2_x, 3 Ja2_y
  Matrix ja1(n, n), ja2(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      ja1(i, j) = elem.metric(base, j * n + i);
      ja2(i, j) = elem.metric(2 + base, j * n + i);
    }

  Matrix acc = basis.diffHat * ja1.cwiseProduct(qNodal) +
               ja2.cwiseProduct(qNodal) * basis.diffHat.transpose();
  for (int f = 0; f < 4; ++f) scatter_face(acc, faceFlux[f], f, basis);

  Matrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = acc(i, j) / elem.jac[j * n + i];
  return out;
}

}  // namespace dgflux
