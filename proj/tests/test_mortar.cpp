#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "dgflux/basis.hpp"
#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"
#include "dgflux/mesh.hpp"
#include "dgflux/mortar.hpp"

using namespace dgflux;

using Flow = CompressibleFlow;
using Scalar = ScalarAdvectionDiffusion;

namespace {

const std::array<NodeFamily, 2> kFamilies{NodeFamily::LegendreGaussLobatto,
                                          NodeFamily::LegendreGauss};

Real poly(const Vector& c, Real x) {
  Real v = 0.0, p = 1.0;
  for (Index k = 0; k < c.size(); ++k) {
    v += c[k] * p;
    p *= x;
  }
  return v;
}

Flow::State constant_state() {
  Flow::State w;
  w << 1.0, 0.3, -0.2, 1.0;
  return prim_to_cons(Flow{}, w);
}

// periodic-compatible sinusoidal displacement for a [0,span]^2 domain
CurvingFunction wiggle(Real span) {
  return [span](const Vector2& p) {
    const Real s =
        std::sin(2.0 * M_PI * p.x() / span) * std::sin(2.0 * M_PI * p.y() / span);
    return Vector2(p.x() + 0.13 * s, p.y() - 0.10 * s);
  };
}

// integral-weighted residual sum per variable, the discrete conservation sum
Real conservation_sum(const Mesh& mesh, const NodalBasis& basis, const StateVector& dudt,
                      int v) {
  Real total = 0.0;
  const Index n = basis.count();
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const auto m = dudt.var(e, v);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        total += mesh.elements[e].jac[j * n + i] * basis.weights[i] * basis.weights[j] * m(i, j);
  }
  return total;
}

}  // namespace

TEST_CASE("child interpolation reproduces parent face polynomials") {
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    const int N = 4;
    const NodalBasis basis = build_basis(N, family);
    const MortarMatrices mm = build_mortar_matrices(basis);
    const Index n = basis.count();

    SUBCASE("constants pass through") {
      const Matrix tr = Matrix::Constant(1, n, 3.25);
      const Matrix lo = mortar_to_child(mm, MortarRole::LowerChild, tr);
      const Matrix up = mortar_to_child(mm, MortarRole::UpperChild, tr);
      for (Index k = 0; k < n; ++k) {
        CHECK(lo(0, k) == doctest::Approx(3.25).epsilon(1e-14));
        CHECK(up(0, k) == doctest::Approx(3.25).epsilon(1e-14));
      }
    }

    SUBCASE("degree-N data is sampled exactly on the half intervals") {
      Vector c(N + 1);
      c << 0.4, -1.2, 0.7, 2.1, -0.6;
      Matrix tr(1, n);
      for (Index k = 0; k < n; ++k) tr(0, k) = poly(c, basis.nodes[k]);
      const Matrix lo = mortar_to_child(mm, MortarRole::LowerChild, tr);
      const Matrix up = mortar_to_child(mm, MortarRole::UpperChild, tr);
      for (Index k = 0; k < n; ++k) {
        CHECK(lo(0, k) == doctest::Approx(poly(c, (basis.nodes[k] - 1.0) / 2.0)).epsilon(1e-12));
        CHECK(up(0, k) == doctest::Approx(poly(c, (basis.nodes[k] + 1.0) / 2.0)).epsilon(1e-12));
      }
    }

    SUBCASE("a linear trace lands on the lower child map") {
      Matrix tr(1, n);
      for (Index k = 0; k < n; ++k) tr(0, k) = basis.nodes[k];
      const Matrix lo = mortar_to_child(mm, MortarRole::LowerChild, tr);
      for (Index k = 0; k < n; ++k)
        CHECK(lo(0, k) == doctest::Approx((basis.nodes[k] - 1.0) / 2.0).epsilon(1e-13));
    }

    SUBCASE("parent roles are rejected") {
      const Matrix tr = Matrix::Zero(1, n);
      CHECK_THROWS_AS(mortar_to_child(mm, MortarRole::BigParent, tr), DgError);
      CHECK_THROWS_AS(mortar_to_child(mm, MortarRole::None, tr), DgError);
    }
  }
}

TEST_CASE("flux projection round trips and preserves the weighted total") {
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    for (int N : {3, 5}) {
      const NodalBasis basis = build_basis(N, family);
      const MortarMatrices mm = build_mortar_matrices(basis);
      const Index n = basis.count();

      // PL IL + PU IU = I makes interpolate-then-project the identity
      const Matrix round =
          mm.fromLower * mm.toLower + mm.fromUpper * mm.toUpper - Matrix::Identity(n, n);
      CHECK(round.cwiseAbs().maxCoeff() < 1e-12);

      const Matrix cst = mortar_project(mm, Matrix::Constant(2, n, -1.75),
                                        Matrix::Constant(2, n, -1.75));
      CHECK((cst.array() + 1.75).abs().maxCoeff() < 1e-13);

      // half-interval samples of one polynomial project back onto it
      Vector c(N + 1);
      std::mt19937_64 rng(91 + N);
      std::uniform_real_distribution<Real> coef(-2.0, 2.0);
      for (Index k = 0; k <= N; ++k) c[k] = coef(rng);
      Matrix parent(1, n), lo(1, n), up(1, n);
      for (Index k = 0; k < n; ++k) {
        parent(0, k) = poly(c, basis.nodes[k]);
        lo(0, k) = poly(c, (basis.nodes[k] - 1.0) / 2.0);
        up(0, k) = poly(c, (basis.nodes[k] + 1.0) / 2.0);
      }
      const Matrix back = mortar_project(mm, lo, up);
      CHECK((back - parent).cwiseAbs().maxCoeff() < 1e-12);

      // the parent quadrature total equals half the children's sum, the
      // half being the reference measure of each child interval
      Matrix fl(3, n), fu(3, n);
      std::uniform_real_distribution<Real> val(-3.0, 3.0);
      for (Index r = 0; r < 3; ++r)
        for (Index k = 0; k < n; ++k) {
          fl(r, k) = val(rng);
          fu(r, k) = val(rng);
        }
      const Matrix fb = mortar_project(mm, fl, fu);
      for (Index r = 0; r < 3; ++r) {
        const Real parentSum = (fb.row(r) * basis.weights).value();
        const Real childSum =
            0.5 * (fl.row(r) * basis.weights + fu.row(r) * basis.weights).value();
        CHECK(parentSum == doctest::Approx(childSum).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("refined interfaces transport exact polynomials like conforming ones") {
  // A degree-N field is represented exactly on both sides of a 2:1 interface,
  // so interpolation, projection, and scaling must reproduce the analytic
  // time derivative on every element.
  const int N = 3;
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    std::vector<Form> forms{Form::Weak, Form::Strong};
    if (family == NodeFamily::LegendreGaussLobatto) forms.push_back(Form::Split);
    for (Form form : forms) {
      CAPTURE(static_cast<int>(form));
      GenerateParams p;
      p.nx = 2;
      p.ny = 2;
      p.x1 = 2.0;
      p.y1 = 2.0;
      p.ngeo = 1;
      Mesh base = generate_cartesian(p);
      RefineRegion region{1.01, 1.99, -0.1, 2.1};
      Mesh mesh = build_mortar_interfaces(base, region);
      REQUIRE(mesh.n_elements() == 10);
      const NodalBasis basis = build_basis(N, family);
      compute_metrics(mesh, basis);

      Scalar eq;
      eq.velocity = Vector2(0.7, 0.4);
      BoundaryConditions<Scalar> bcs;
      for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::Dirichlet;
      auto field = [](Real x, Real y) { return x * x * y + 2.0 * y - x + 0.5; };
      bcs.exact = [&](const Vector2& x, Real) {
        Scalar::State s;
        s << field(x.x(), x.y());
        return s;
      };
      DgOptions opts;
      opts.form = form;
      SpatialOperator<Scalar> op(mesh, basis, eq, opts, bcs);

      StateVector u(mesh.n_elements(), 1, basis.count());
      StateVector dudt(mesh.n_elements(), 1, basis.count());
      for (Index e = 0; e < mesh.n_elements(); ++e) {
        auto m = u.var(e, 0);
        for (Index j = 0; j < basis.count(); ++j)
          for (Index i = 0; i < basis.count(); ++i) {
            const Vector2 x = mesh.elements[e].xNodes.col(j * basis.count() + i);
            m(i, j) = field(x.x(), x.y());
          }
      }
      op.rhs(u, 0.0, dudt);

      Real worst = 0.0;
      for (Index e = 0; e < mesh.n_elements(); ++e) {
        const auto m = dudt.var(e, 0);
        for (Index j = 0; j < basis.count(); ++j)
          for (Index i = 0; i < basis.count(); ++i) {
            const Vector2 x = mesh.elements[e].xNodes.col(j * basis.count() + i);
            const Real exact =
                -(0.7 * (2.0 * x.x() * x.y() - 1.0) + 0.4 * (x.x() * x.x() + 2.0));
            worst = std::max(worst, std::abs(m(i, j) - exact));
          }
      }
      CHECK(worst < 5e-12);
    }
  }
}

TEST_CASE("constant flow is preserved across curved mortar interfaces") {
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    std::vector<Form> forms{Form::Weak, Form::Strong};
    if (family == NodeFamily::LegendreGaussLobatto) forms.push_back(Form::Split);
    GenerateParams p;
    p.nx = 4;
    p.ny = 4;
    p.x1 = 8.0;
    p.y1 = 8.0;
    p.ngeo = 3;
    p.periodicX = true;
    p.periodicY = true;
    Mesh base = generate_cartesian(p);
    apply_curving(base, wiggle(8.0));
    Mesh mesh = build_mortar_interfaces(base, RefineRegion{2.02, 5.98, 2.02, 5.98});
    REQUIRE(mesh.n_elements() == 28);
    const NodalBasis basis = build_basis(4, family);
    compute_metrics(mesh, basis);

    for (Form form : forms) {
      CAPTURE(static_cast<int>(form));
      DgOptions opts;
      opts.form = form;
      SpatialOperator<Flow> op(mesh, basis, Flow{}, opts, {});
      StateVector u(mesh.n_elements(), 4, basis.count());
      StateVector dudt(mesh.n_elements(), 4, basis.count());
      const Flow::State q = constant_state();
      for (Index e = 0; e < mesh.n_elements(); ++e)
        for (int v = 0; v < 4; ++v) u.var(e, v).setConstant(q[v]);
      op.rhs(u, 0.0, dudt);
      CHECK(dudt.flat().cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("periodic mortar meshes conserve the total state") {
  GenerateParams p;
  p.nx = 4;
  p.ny = 4;
  p.x1 = 4.0;
  p.y1 = 4.0;
  p.ngeo = 2;
  p.periodicX = true;
  p.periodicY = true;
  Mesh base = generate_cartesian(p);
  apply_curving(base, wiggle(4.0));
  Mesh mesh = build_mortar_interfaces(base, RefineRegion{1.01, 2.99, 1.01, 2.99});
  const NodalBasis basis = build_basis(4, NodeFamily::LegendreGaussLobatto);
  compute_metrics(mesh, basis);

  SpatialOperator<Flow> op(mesh, basis, Flow{}, {}, {});
  StateVector u(mesh.n_elements(), 4, basis.count());
  StateVector dudt(mesh.n_elements(), 4, basis.count());
  const Flow eq;
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Index n = basis.count();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
        Flow::State w;
        w << 1.0 + 0.2 * std::sin(2.0 * M_PI * x.x()) * std::cos(2.0 * M_PI * x.y()),
            0.3 * std::cos(2.0 * M_PI * x.x()), -0.2 * std::sin(2.0 * M_PI * x.y()),
            1.0 + 0.1 * std::sin(2.0 * M_PI * (x.x() + x.y()));
        const Flow::State q = prim_to_cons(eq, w);
        for (int v = 0; v < 4; ++v) u.var(e, v)(i, j) = q[v];
      }
  }
  op.rhs(u, 0.0, dudt);
  for (int v = 0; v < 4; ++v) {
    CAPTURE(v);
    CHECK(std::abs(conservation_sum(mesh, basis, dudt, v)) < 1e-12);
  }
}
