#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>

#include "dgflux/basis.hpp"
#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"
#include "dgflux/mesh.hpp"
#include "dgflux/tensor.hpp"

using namespace dgflux;

using Flow = CompressibleFlow;
using Scalar = ScalarAdvectionDiffusion;

namespace {

const std::array<NodeFamily, 2> kFamilies{NodeFamily::LegendreGaussLobatto,
                                          NodeFamily::LegendreGauss};

// plain product-formula Lagrange evaluation, independent of the basis tables
Real lagrange_at(const Vector& nodes, Index i, Real x) {
  Real v = 1.0;
  for (Index k = 0; k < nodes.size(); ++k)
    if (k != i) v *= (x - nodes[k]) / (nodes[i] - nodes[k]);
  return v;
}

// periodic-compatible sinusoidal displacement for a [0,span]^2 domain
CurvingFunction wiggle(Real span) {
  return [span](const Vector2& p) {
    const Real s =
        std::sin(2.0 * M_PI * p.x() / span) * std::sin(2.0 * M_PI * p.y() / span);
    return Vector2(p.x() + 0.13 * s, p.y() - 0.10 * s);
  };
}

template <class F>
void fill_scalar(StateVector& u, const Mesh& mesh, Index n, F f) {
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    auto m = u.var(e, 0);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
        m(i, j) = f(x.x(), x.y());
      }
  }
}

template <class F>
void fill_flow(StateVector& u, const Mesh& mesh, Index n, const Flow& eq, F prim) {
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
        const Flow::State q = prim_to_cons(eq, prim(x.x(), x.y()));
        for (int v = 0; v < 4; ++v) u.var(e, v)(i, j) = q[v];
      }
}

Flow::State smooth_prim(Real x, Real y) {
  Flow::State w;
  w << 1.0 + 0.2 * std::sin(2.0 * M_PI * x) * std::cos(2.0 * M_PI * y),
      0.3 * std::cos(2.0 * M_PI * x), -0.2 * std::sin(2.0 * M_PI * y),
      1.0 + 0.1 * std::sin(2.0 * M_PI * (x + y));
  return w;
}

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

TEST_CASE("face prolongation matches polynomial evaluation") {
  SUBCASE("constants survive every face") {
    for (NodeFamily family : kFamilies) {
      const NodalBasis b = build_basis(3, family);
      const Matrix nodal = Matrix::Constant(b.count(), b.count(), -0.8);
      for (int f = 0; f < 4; ++f) {
        const Vector tr = face_trace(nodal, f, b);
        CHECK((tr.array() + 0.8).abs().maxCoeff() < 1e-14);
      }
    }
  }

  SUBCASE("boundary nodes pass through unchanged") {
    const NodalBasis b = build_basis(4, NodeFamily::LegendreGaussLobatto);
    const Index n = b.count();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> dist(-2.0, 2.0);
    Matrix nodal(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) nodal(i, j) = dist(rng);
    CHECK((face_trace(nodal, 0, b) == nodal.row(0).transpose()));
    CHECK((face_trace(nodal, 1, b) == nodal.row(n - 1).transpose()));
    CHECK((face_trace(nodal, 2, b) == nodal.col(0)));
    CHECK((face_trace(nodal, 3, b) == nodal.col(n - 1)));
  }

  SUBCASE("interior nodes extrapolate their polynomial") {
    const NodalBasis b = build_basis(3, NodeFamily::LegendreGauss);
    const Index n = b.count();
    // nodal data sampling f(xi, eta) = xi^3 - 2 xi + eta
    Matrix nodal(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Real xi = b.nodes[i], eta = b.nodes[j];
        nodal(i, j) = xi * xi * xi - 2.0 * xi + eta;
      }
    const Vector left = face_trace(nodal, 0, b);
    const Vector right = face_trace(nodal, 1, b);
    for (Index j = 0; j < n; ++j) {
      CHECK(left[j] == doctest::Approx(1.0 + b.nodes[j]).epsilon(1e-13));
      CHECK(right[j] == doctest::Approx(-1.0 + b.nodes[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("the surface scatter applies the lifted boundary weights") {
  const NodalBasis b = build_basis(2, NodeFamily::LegendreGauss);
  const Index n = b.count();
  Matrix acc = Matrix::Zero(n, n);
  scatter_face(acc, Vector::Ones(n), 1, b);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Real expect = lagrange_at(b.nodes, i, 1.0) / b.weights[i];
      CHECK(acc(i, j) == doctest::Approx(expect).epsilon(1e-13));
    }

  // on Gauss-Lobatto nodes the lift touches only the boundary row
  const NodalBasis bl = build_basis(3, NodeFamily::LegendreGaussLobatto);
  Matrix accl = Matrix::Zero(bl.count(), bl.count());
  scatter_face(accl, Vector::Ones(bl.count()), 0, bl);
  for (Index j = 0; j < bl.count(); ++j) {
    CHECK(accl(0, j) == doctest::Approx(1.0 / bl.weights[0]).epsilon(1e-14));
    for (Index i = 1; i < bl.count(); ++i) CHECK(accl(i, j) == 0.0);
  }
}

TEST_CASE("a single periodic element matches a dense reference") {
  // advection of sin(pi x) with unit x-velocity on one self-periodic element;
  // every matrix in the reference is rebuilt from scratch in this test
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    const int N = 4;
    GenerateParams p;
    p.periodicX = true;
    p.periodicY = true;
    Mesh mesh = generate_cartesian(p);
    REQUIRE(mesh.n_elements() == 1);
    const NodalBasis basis = build_basis(N, family);
    compute_metrics(mesh, basis);
    const Index n = basis.count();

    Scalar eq;
    eq.velocity = Vector2(1.0, 0.0);
    eq.diffusivity = 0.0;
    SpatialOperator<Scalar> op(mesh, basis, eq, {}, {});
    StateVector u(1, 1, n), dudt(1, 1, n);
    fill_scalar(u, mesh, n, [](Real x, Real) { return std::sin(M_PI * x); });
    op.rhs(u, 0.0, dudt);

    // barycentric differentiation matrix and its weighted adjoint
    Vector bw = Vector::Ones(n);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k)
        if (k != i) bw[i] /= basis.nodes[i] - basis.nodes[k];
    Matrix D = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j)
        if (i != j) {
          D(i, j) = (bw[j] / bw[i]) / (basis.nodes[i] - basis.nodes[j]);
          D(i, i) -= D(i, j);
        }
    }
    Matrix Dhat(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        Dhat(i, j) = -(basis.weights[j] / basis.weights[i]) * D(j, i);

    const auto um = u.var(0, 0);
    for (Index j = 0; j < n; ++j) {
      // upwind flux at the periodic face: the +x trace wins everywhere
      Real t1 = 0.0;
      for (Index i = 0; i < n; ++i) t1 += um(i, j) * lagrange_at(basis.nodes, i, 1.0);
      for (Index i = 0; i < n; ++i) {
        Real vol = 0.0;
        for (Index a = 0; a < n; ++a) vol += Dhat(i, a) * 0.5 * um(a, j);
        const Real lp = lagrange_at(basis.nodes, i, 1.0) / basis.weights[i];
        const Real lm = lagrange_at(basis.nodes, i, -1.0) / basis.weights[i];
        const Real expect = -4.0 * (vol + 0.5 * t1 * lp - 0.5 * t1 * lm);
        CHECK(dudt.var(0, 0)(i, j) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("constant states are preserved on curved meshes") {
  Flow::State w;
  w << 1.0, 0.3, -0.2, 2.0;
  const Flow::State q = prim_to_cons(Flow{}, w);

  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    std::vector<Form> forms{Form::Weak, Form::Strong};
    if (family == NodeFamily::LegendreGaussLobatto) forms.push_back(Form::Split);

    GenerateParams p;
    p.nx = 4;
    p.ny = 4;
    p.x1 = 4.0;
    p.y1 = 4.0;
    p.ngeo = 3;
    p.periodicX = true;
    p.periodicY = true;
    Mesh mesh = generate_cartesian(p);
    apply_curving(mesh, wiggle(4.0));
    const NodalBasis basis = build_basis(4, family);
    compute_metrics(mesh, basis);

    for (Form form : forms) {
      CAPTURE(static_cast<int>(form));
      DgOptions opts;
      opts.form = form;
      SpatialOperator<Flow> op(mesh, basis, Flow{}, opts, {});
      StateVector u(mesh.n_elements(), 4, basis.count());
      StateVector dudt(mesh.n_elements(), 4, basis.count());
      for (Index e = 0; e < mesh.n_elements(); ++e)
        for (int v = 0; v < 4; ++v) u.var(e, v).setConstant(q[v]);
      op.rhs(u, 0.0, dudt);
      CHECK(dudt.flat().cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("with boundary faces instead of periodic wrap") {
    GenerateParams p;
    p.nx = 3;
    p.ny = 3;
    p.x1 = 3.0;
    p.y1 = 3.0;
    p.ngeo = 2;
    Mesh mesh = generate_cartesian(p);
    apply_curving(mesh, wiggle(3.0));
    const NodalBasis basis = build_basis(3, NodeFamily::LegendreGauss);
    compute_metrics(mesh, basis);
    BoundaryConditions<Flow> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::Dirichlet;
    bcs.exact = [&](const Vector2&, Real) { return q; };
    SpatialOperator<Flow> op(mesh, basis, Flow{}, {}, bcs);
    StateVector u(mesh.n_elements(), 4, basis.count());
    StateVector dudt(mesh.n_elements(), 4, basis.count());
    for (Index e = 0; e < mesh.n_elements(); ++e)
      for (int v = 0; v < 4; ++v) u.var(e, v).setConstant(q[v]);
    op.rhs(u, 0.0, dudt);
    CHECK(dudt.flat().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("weak and strong forms agree on Gauss-Lobatto nodes") {
  GenerateParams p;
  p.nx = 3;
  p.ny = 3;
  p.x1 = 3.0;
  p.y1 = 3.0;
  p.ngeo = 2;
  p.periodicX = true;
  p.periodicY = true;
  Mesh mesh = generate_cartesian(p);
  apply_curving(mesh, wiggle(3.0));
  const NodalBasis basis = build_basis(4, NodeFamily::LegendreGaussLobatto);
  compute_metrics(mesh, basis);

  for (RiemannSolver solver : {RiemannSolver::Rusanov, RiemannSolver::Roe}) {
    CAPTURE(static_cast<int>(solver));
    DgOptions weak, strong;
    weak.solver = strong.solver = solver;
    weak.form = Form::Weak;
    strong.form = Form::Strong;
    SpatialOperator<Flow> opW(mesh, basis, Flow{}, weak, {});
    SpatialOperator<Flow> opS(mesh, basis, Flow{}, strong, {});

    std::mt19937_64 rng(451 + static_cast<int>(solver));
    std::uniform_real_distribution<Real> rho(0.8, 1.25), vel(-0.4, 0.4), prs(0.8, 1.3);
    const Index n = basis.count();
    StateVector u(mesh.n_elements(), 4, n);
    StateVector rw(mesh.n_elements(), 4, n), rs(mesh.n_elements(), 4, n);
    for (int trial = 0; trial < 20; ++trial) {
      for (Index e = 0; e < mesh.n_elements(); ++e)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < n; ++i) {
            Flow::State w;
            w << rho(rng), vel(rng), vel(rng), prs(rng);
            const Flow::State q = prim_to_cons(Flow{}, w);
            for (int v = 0; v < 4; ++v) u.var(e, v)(i, j) = q[v];
          }
      opW.rhs(u, 0.0, rw);
      opS.rhs(u, 0.0, rs);
      CHECK((rw.flat() - rs.flat()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("periodic domains conserve the integrated state") {
  GenerateParams p;
  p.nx = 4;
  p.ny = 4;
  p.x1 = 4.0;
  p.y1 = 4.0;
  p.ngeo = 2;
  p.periodicX = true;
  p.periodicY = true;
  Mesh mesh = generate_cartesian(p);
  apply_curving(mesh, wiggle(4.0));

  SUBCASE("compressible flow") {
    const NodalBasis basis = build_basis(4, NodeFamily::LegendreGaussLobatto);
    compute_metrics(mesh, basis);
    SpatialOperator<Flow> op(mesh, basis, Flow{}, {}, {});
    StateVector u(mesh.n_elements(), 4, basis.count());
    StateVector dudt(mesh.n_elements(), 4, basis.count());
    fill_flow(u, mesh, basis.count(), Flow{}, smooth_prim);
    op.rhs(u, 0.0, dudt);
    for (int v = 0; v < 4; ++v) {
      CAPTURE(v);
      CHECK(std::abs(conservation_sum(mesh, basis, dudt, v)) < 1e-12);
    }
  }

  SUBCASE("scalar advection") {
    const NodalBasis basis = build_basis(3, NodeFamily::LegendreGauss);
    compute_metrics(mesh, basis);
    Scalar eq;
    eq.velocity = Vector2(0.9, -0.4);
    SpatialOperator<Scalar> op(mesh, basis, eq, {}, {});
    StateVector u(mesh.n_elements(), 1, basis.count());
    StateVector dudt(mesh.n_elements(), 1, basis.count());
    fill_scalar(u, mesh, basis.count(), [](Real x, Real y) {
      return 1.0 + 0.5 * std::sin(2.0 * M_PI * x) * std::cos(2.0 * M_PI * y);
    });
    op.rhs(u, 0.0, dudt);
    CHECK(std::abs(conservation_sum(mesh, basis, dudt, 0)) < 1e-12);
  }
}

TEST_CASE("the advective time derivative converges at the polynomial order") {
  // The truncation error of the semidiscrete operator decays as h^N; the
  // extra order familiar from solution-error studies only appears after time
  // integration, when the dissipative part of the residual stops
  // accumulating. The solver-level convergence study covers that side.
  const int N = 5;
  Scalar eq;
  eq.velocity = Vector2(1.0, 0.0);

  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    const NodalBasis basis = build_basis(N, family);
    std::array<Real, 3> errs{};
    const std::array<Index, 3> sizes{4, 8, 16};
    for (int k = 0; k < 3; ++k) {
      GenerateParams p;
      p.nx = sizes[k];
      p.ny = sizes[k];
      p.x1 = 2.0;
      p.y1 = 2.0;
      p.periodicX = true;
      p.periodicY = true;
      Mesh mesh = generate_cartesian(p);
      compute_metrics(mesh, basis);
      SpatialOperator<Scalar> op(mesh, basis, eq, {}, {});
      StateVector u(mesh.n_elements(), 1, basis.count());
      StateVector dudt(mesh.n_elements(), 1, basis.count());
      fill_scalar(u, mesh, basis.count(), [](Real x, Real) { return std::sin(M_PI * x); });
      op.rhs(u, 0.0, dudt);
      Real err = 0.0;
      const Index n = basis.count();
      for (Index e = 0; e < mesh.n_elements(); ++e)
        for (Index j = 0; j < n; ++j)
          for (Index i = 0; i < n; ++i) {
            const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
            const Real d = dudt.var(e, 0)(i, j) + M_PI * std::cos(M_PI * x.x());
            err +=
                mesh.elements[e].jac[j * n + i] * basis.weights[i] * basis.weights[j] * d * d;
          }
      errs[k] = std::sqrt(err);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    const Real eoc = std::log2(errs[1] / errs[2]);
    CAPTURE(errs[0]);
    CAPTURE(errs[1]);
    CAPTURE(errs[2]);
    CHECK(eoc > N - 0.4);
    CHECK(eoc < N + 0.7);
  }
}

TEST_CASE("the time derivative is partition invariant bit for bit") {
  auto build = [](int parts) {
    GenerateParams p;
    p.nx = 6;
    p.ny = 6;
    p.x1 = 6.0;
    p.y1 = 6.0;
    p.ngeo = 2;
    p.periodicX = true;
    p.periodicY = true;
    Mesh mesh = generate_cartesian(p);
    apply_curving(mesh, wiggle(6.0));
    const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);
    compute_metrics(mesh, basis);
    assign_partitions(mesh, parts);
    return mesh;
  };
  const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);
  const Mesh reference = build(1);

  StateVector u(reference.n_elements(), 4, basis.count());
  fill_flow(u, reference, basis.count(), Flow{}, smooth_prim);
  SpatialOperator<Flow> opRef(reference, basis, Flow{}, {}, {});
  StateVector base(reference.n_elements(), 4, basis.count());
  opRef.rhs(u, 0.0, base);

  for (int parts : {2, 7}) {
    CAPTURE(parts);
    const Mesh mesh = build(parts);
    SpatialOperator<Flow> op(mesh, basis, Flow{}, {}, {});
    StateVector dudt(mesh.n_elements(), 4, basis.count());
    op.rhs(u, 0.0, dudt);
    CHECK(std::memcmp(base.flat().data(), dudt.flat().data(),
                      sizeof(Real) * static_cast<size_t>(base.flat().size())) == 0);
  }
}

TEST_CASE("invalid configurations are rejected at construction") {
  GenerateParams p;
  p.nx = 2;
  p.ny = 2;
  Mesh open = generate_cartesian(p);
  const NodalBasis lg = build_basis(3, NodeFamily::LegendreGauss);
  const NodalBasis lgl = build_basis(3, NodeFamily::LegendreGaussLobatto);

  SUBCASE("the split form requires Gauss-Lobatto nodes") {
    Mesh mesh = open;
    compute_metrics(mesh, lg);
    DgOptions opts;
    opts.form = Form::Split;
    BoundaryConditions<Flow> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::SlipWall;
    CHECK_THROWS_AS((SpatialOperator<Flow>(mesh, lg, Flow{}, opts, bcs)), ConfigError);
  }

  SUBCASE("every boundary tag needs a condition") {
    Mesh mesh = open;
    compute_metrics(mesh, lgl);
    BoundaryConditions<Flow> bcs;
    bcs.kinds[mesh.boundaryTags[0]] = BcKind::SlipWall;
    CHECK_THROWS_AS((SpatialOperator<Flow>(mesh, lgl, Flow{}, {}, bcs)), ConfigError);
  }

  SUBCASE("walls are undefined for the scalar system") {
    Mesh mesh = open;
    compute_metrics(mesh, lgl);
    BoundaryConditions<Scalar> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::SlipWall;
    CHECK_THROWS_AS((SpatialOperator<Scalar>(mesh, lgl, Scalar{}, {}, bcs)), ConfigError);
  }

  SUBCASE("Dirichlet tags need boundary data") {
    Mesh mesh = open;
    compute_metrics(mesh, lgl);
    BoundaryConditions<Flow> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::Dirichlet;
    CHECK_THROWS_AS((SpatialOperator<Flow>(mesh, lgl, Flow{}, {}, bcs)), ConfigError);
  }

  SUBCASE("the mesh metrics must match the basis") {
    Mesh mesh = open;
    compute_metrics(mesh, lgl);
    const NodalBasis other = build_basis(4, NodeFamily::LegendreGaussLobatto);
    BoundaryConditions<Flow> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::SlipWall;
    CHECK_THROWS_AS((SpatialOperator<Flow>(mesh, other, Flow{}, {}, bcs)), DgError);
  }

  SUBCASE("element kind updates are validated") {
    GenerateParams pp;
    pp.nx = 2;
    pp.ny = 2;
    pp.periodicX = true;
    pp.periodicY = true;
    Mesh mesh = generate_cartesian(pp);
    compute_metrics(mesh, lgl);
    SpatialOperator<Flow> op(mesh, lgl, Flow{}, {}, {});
    CHECK_THROWS_AS(op.set_element_kinds({ElementKind::Fv}), DgError);

    Flow viscous;
    viscous.mu = 0.01;
    SpatialOperator<Flow> opv(mesh, lgl, viscous, {}, {});
    std::vector<ElementKind> kinds(mesh.n_elements(), ElementKind::Dg);
    kinds[0] = ElementKind::Fv;
    CHECK_THROWS_AS(opv.set_element_kinds(kinds), ConfigError);
  }

  SUBCASE("subcell elements may not touch mortar interfaces") {
    GenerateParams pp;
    pp.nx = 2;
    pp.ny = 2;
    pp.x1 = 2.0;
    pp.y1 = 2.0;
    Mesh base = generate_cartesian(pp);
    Mesh mesh = build_mortar_interfaces(base, RefineRegion{1.01, 1.99, -0.1, 2.1});
    compute_metrics(mesh, lgl);
    BoundaryConditions<Flow> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::SlipWall;
    SpatialOperator<Flow> op(mesh, lgl, Flow{}, {}, bcs);
    Index coarse = -1;
    for (const Side& s : mesh.sides)
      if (s.mortar == MortarRole::BigParent) coarse = s.master;
    REQUIRE(coarse >= 0);
    std::vector<ElementKind> kinds(mesh.n_elements(), ElementKind::Dg);
    kinds[coarse] = ElementKind::Fv;
    CHECK_THROWS_AS(op.set_element_kinds(kinds), DgError);
  }
}
