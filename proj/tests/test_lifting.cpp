#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>

#include "dgflux/basis.hpp"
#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"
#include "dgflux/lifting.hpp"
#include "dgflux/mesh.hpp"

using namespace dgflux;

using Flow = CompressibleFlow;
using Scalar = ScalarAdvectionDiffusion;

namespace {

const std::array<NodeFamily, 2> kFamilies{NodeFamily::LegendreGaussLobatto,
                                          NodeFamily::LegendreGauss};

// periodic-compatible sinusoidal displacement for a [0,span]^2 domain
CurvingFunction wiggle(Real span) {
  return [span](const Vector2& p) {
    const Real s =
        std::sin(2.0 * M_PI * p.x() / span) * std::sin(2.0 * M_PI * p.y() / span);
    return Vector2(p.x() + 0.12 * s, p.y() - 0.09 * s);
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
Real l2_error(const Mesh& mesh, const NodalBasis& basis, const Matrix& field, Index e, F exact) {
  Real err = 0.0;
  const Index n = basis.count();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
      const Real d = field(i, j) - exact(x.x(), x.y());
      err += mesh.elements[e].jac[j * n + i] * basis.weights[i] * basis.weights[j] * d * d;
    }
  return err;
}

}  // namespace

TEST_CASE("lifted gradients vanish on constant fields") {
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    GenerateParams p;
    p.nx = 3;
    p.ny = 3;
    p.x1 = 3.0;
    p.y1 = 3.0;
    p.ngeo = 3;
    p.periodicX = true;
    p.periodicY = true;
    Mesh mesh = generate_cartesian(p);
    apply_curving(mesh, wiggle(3.0));
    const NodalBasis basis = build_basis(3, family);
    compute_metrics(mesh, basis);

    Scalar eq;
    eq.velocity = Vector2(0.0, 0.0);
    eq.diffusivity = 0.3;
    SpatialOperator<Scalar> op(mesh, basis, eq, {}, {});
    StateVector u(mesh.n_elements(), 1, basis.count());
    StateVector dudt(mesh.n_elements(), 1, basis.count());
    u.flat().setConstant(1.3);
    op.rhs(u, 0.0, dudt);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      CHECK(op.grad_x(e, 0).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(op.grad_y(e, 0).cwiseAbs().maxCoeff() < 1e-13);
    }
    // the spurious gradient noise passes through the viscous divergence once
    // more, so the derivative bound sits two decades above the gradient one
    CHECK(dudt.flat().cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("affine fields lift their exact gradients") {
  for (NodeFamily family : kFamilies) {
    CAPTURE(static_cast<int>(family));
    GenerateParams p;
    p.nx = 2;
    p.ny = 2;
    Mesh mesh = generate_cartesian(p);
    const NodalBasis basis = build_basis(2, family);
    compute_metrics(mesh, basis);

    Scalar eq;
    eq.velocity = Vector2(0.0, 0.0);
    eq.diffusivity = 1.0;
    BoundaryConditions<Scalar> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::Dirichlet;
    bcs.exact = [](const Vector2& x, Real) {
      Scalar::State s;
      s << 2.0 * x.x() - 3.0 * x.y();
      return s;
    };
    SpatialOperator<Scalar> op(mesh, basis, eq, {}, bcs);
    StateVector u(mesh.n_elements(), 1, basis.count());
    StateVector dudt(mesh.n_elements(), 1, basis.count());
    fill_scalar(u, mesh, basis.count(), [](Real x, Real y) { return 2.0 * x - 3.0 * y; });
    op.rhs(u, 0.0, dudt);
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      CHECK((op.grad_x(e, 0).array() - 2.0).abs().maxCoeff() < 1e-12);
      CHECK((op.grad_y(e, 0).array() + 3.0).abs().maxCoeff() < 1e-12);
    }
    // the diffusive flux of an affine field is constant, so its divergence
    // must vanish discretely as well
    CHECK(dudt.flat().cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("lifted gradients converge at the polynomial order") {
  const int N = 3;
  Scalar eq;
  eq.velocity = Vector2(0.0, 0.0);
  eq.diffusivity = 1.0;
  const NodalBasis basis = build_basis(N, NodeFamily::LegendreGaussLobatto);

  std::array<Real, 3> errs{};
  const std::array<Index, 3> sizes{2, 4, 8};
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
    for (Index e = 0; e < mesh.n_elements(); ++e)
      err += l2_error(mesh, basis, op.grad_x(e, 0), e,
                      [](Real x, Real) { return M_PI * std::cos(M_PI * x); });
    errs[k] = std::sqrt(err);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  const Real eoc = std::log2(errs[1] / errs[2]);
  CAPTURE(errs[0]);
  CAPTURE(errs[1]);
  CAPTURE(errs[2]);
  CHECK(eoc > N - 0.4);
}

TEST_CASE("scalar diffusion reproduces the Laplacian") {
  const int N = 3;
  Scalar eq;
  eq.velocity = Vector2(0.0, 0.0);
  eq.diffusivity = 0.7;
  const NodalBasis basis = build_basis(N, NodeFamily::LegendreGaussLobatto);
  auto field = [](Real x, Real y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };

  std::array<Real, 3> errs{};
  const std::array<Index, 3> sizes{2, 4, 8};
  for (int k = 0; k < 3; ++k) {
    GenerateParams p;
    p.nx = sizes[k];
    p.ny = sizes[k];
    Mesh mesh = generate_cartesian(p);
    compute_metrics(mesh, basis);
    BoundaryConditions<Scalar> bcs;
    for (int tag : mesh.boundaryTags) bcs.kinds[tag] = BcKind::Dirichlet;
    bcs.exact = [&](const Vector2& x, Real) {
      Scalar::State s;
      s << field(x.x(), x.y());
      return s;
    };
    SpatialOperator<Scalar> op(mesh, basis, eq, {}, bcs);
    StateVector u(mesh.n_elements(), 1, basis.count());
    StateVector dudt(mesh.n_elements(), 1, basis.count());
    fill_scalar(u, mesh, basis.count(), field);
    op.rhs(u, 0.0, dudt);
    Real err = 0.0;
    for (Index e = 0; e < mesh.n_elements(); ++e)
      err += l2_error(mesh, basis, dudt.var(e, 0), e, [&](Real x, Real y) {
        return -0.7 * 2.0 * M_PI * M_PI * field(x, y);
      });
    errs[k] = std::sqrt(err);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  const Real eoc = std::log2(errs[1] / errs[2]);
  CAPTURE(errs[0]);
  CAPTURE(errs[1]);
  CAPTURE(errs[2]);
  CHECK(eoc > N - 0.3);
}

TEST_CASE("the advection-diffusion operator is linear") {
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
  const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);
  compute_metrics(mesh, basis);

  Scalar eq;
  eq.velocity = Vector2(1.0, 1.0);
  eq.diffusivity = 0.5;
  SpatialOperator<Scalar> op(mesh, basis, eq, {}, {});

  const Index nE = mesh.n_elements();
  StateVector a(nE, 1, basis.count()), b(nE, 1, basis.count());
  StateVector mix(nE, 1, basis.count());
  StateVector ra(nE, 1, basis.count()), rb(nE, 1, basis.count()), rm(nE, 1, basis.count());
  fill_scalar(a, mesh, basis.count(),
              [](Real x, Real y) { return std::sin(2.0 * M_PI * x) + 0.3 * y * y; });
  fill_scalar(b, mesh, basis.count(),
              [](Real x, Real y) { return std::cos(2.0 * M_PI * y) * x; });
  const Real alpha = 1.7, beta = -0.6;
  mix.flat() = alpha * a.flat() + beta * b.flat();
  op.rhs(a, 0.0, ra);
  op.rhs(b, 0.0, rb);
  op.rhs(mix, 0.0, rm);
  const Real scale = rm.flat().cwiseAbs().maxCoeff();
  const Real diff =
      (rm.flat() - alpha * ra.flat() - beta * rb.flat()).cwiseAbs().maxCoeff();
  CHECK(diff < 1e-13 * (1.0 + scale));
}

TEST_CASE("the interface viscous flux averages both sides against the normal") {
  Flow eq;
  eq.mu = 0.1;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<Real> dist(-1.0, 1.0);

  auto randomGrad = [&] {
    Flow::LiftGrad g;
    for (Index r = 0; r < 3; ++r)
      for (Index c = 0; c < 2; ++c) g(r, c) = dist(rng);
    return g;
  };
  auto randomState = [&] {
    Flow::State w;
    w << 1.0 + 0.3 * dist(rng), 0.4 * dist(rng), 0.4 * dist(rng), 1.0 + 0.3 * dist(rng);
    return prim_to_cons(eq, w);
  };

  SUBCASE("identical sides collapse to the one-sided flux") {
    const Flow::State q = randomState();
    const Flow::LiftGrad g = randomGrad();
    const Vector2 nhat = Vector2(0.6, 0.8);
    const Flow::Flux fv = viscous_flux(eq, q, g);
    const Flow::State expect = fv.col(0) * nhat.x() + fv.col(1) * nhat.y();
    const Flow::State got = viscous_surface_flux(eq, q, q, g, g, nhat);
    CHECK((got - expect).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("zero gradients give zero flux") {
    const Flow::State a = randomState();
    const Flow::State b = randomState();
    const Flow::LiftGrad g = Flow::LiftGrad::Zero();
    const Flow::State got = viscous_surface_flux(eq, a, b, g, g, Vector2(1.0, 0.0));
    CHECK(got.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("random sides match componentwise reassembly") {
    for (int trial = 0; trial < 20; ++trial) {
      const Flow::State a = randomState();
      const Flow::State b = randomState();
      const Flow::LiftGrad ga = randomGrad();
      const Flow::LiftGrad gb = randomGrad();
      Vector2 nhat(dist(rng), dist(rng));
      nhat.normalize();
      const Flow::Flux mean = 0.5 * (viscous_flux(eq, a, ga) + viscous_flux(eq, b, gb));
      const Flow::State expect = mean.col(0) * nhat.x() + mean.col(1) * nhat.y();
      const Flow::State got = viscous_surface_flux(eq, a, b, ga, gb, nhat);
      CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-14 * (1.0 + expect.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("viscous flow with no-slip walls stays physical and symmetric") {
  // channel with walls on top and bottom, periodic in x; a symmetric shear
  // profile must produce a symmetric time derivative
  Flow eq;
  eq.mu = 0.01;
  GenerateParams p;
  p.nx = 4;
  p.ny = 4;
  p.periodicX = true;
  Mesh mesh = generate_cartesian(p);
  const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);
  compute_metrics(mesh, basis);

  BoundaryConditions<Flow> bcs;
  bcs.kinds[mesh.boundaryTags[2]] = BcKind::NoSlipAdiabatic;
  bcs.kinds[mesh.boundaryTags[3]] = BcKind::NoSlipAdiabatic;
  SpatialOperator<Flow> op(mesh, basis, eq, {}, bcs);

  StateVector u(mesh.n_elements(), 4, basis.count());
  StateVector dudt(mesh.n_elements(), 4, basis.count());
  const Index n = basis.count();
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Vector2 x = mesh.elements[e].xNodes.col(j * n + i);
        Flow::State w;
        w << 1.0, std::sin(M_PI * x.y()), 0.0, 1.0;
        const Flow::State q = prim_to_cons(eq, w);
        for (int v = 0; v < 4; ++v) u.var(e, v)(i, j) = q[v];
      }
  op.rhs(u, 0.0, dudt);
  CHECK(std::isfinite(dudt.flat().cwiseAbs().maxCoeff()));
  // x-momentum diffusion: the profile curvature is largest mid-channel
  Real mass = 0.0;
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        mass += mesh.elements[e].jac[j * n + i] * basis.weights[i] * basis.weights[j] *
                dudt.var(e, 0)(i, j);
  CHECK(std::abs(mass) < 1e-12);
}

TEST_CASE("lifted gradients are partition invariant") {
  auto build = [](int parts) {
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
    const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);
    compute_metrics(mesh, basis);
    assign_partitions(mesh, parts);
    return mesh;
  };
  const Mesh meshA = build(1);
  const Mesh meshB = build(3);
  const NodalBasis basis = build_basis(3, NodeFamily::LegendreGaussLobatto);

  Flow eq;
  eq.mu = 0.05;
  SpatialOperator<Flow> opA(meshA, basis, eq, {}, {});
  SpatialOperator<Flow> opB(meshB, basis, eq, {}, {});

  const Index n = basis.count();
  StateVector u(meshA.n_elements(), 4, n);
  for (Index e = 0; e < meshA.n_elements(); ++e)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Vector2 x = meshA.elements[e].xNodes.col(j * n + i);
        Flow::State w;
        w << 1.0 + 0.2 * std::sin(2.0 * M_PI * x.x()) * std::cos(2.0 * M_PI * x.y()),
            0.3 * std::cos(2.0 * M_PI * x.x()), -0.2 * std::sin(2.0 * M_PI * x.y()),
            1.0 + 0.1 * std::sin(2.0 * M_PI * (x.x() + x.y()));
        const Flow::State q = prim_to_cons(eq, w);
        for (int v = 0; v < 4; ++v) u.var(e, v)(i, j) = q[v];
      }
  StateVector ra(meshA.n_elements(), 4, n), rb(meshA.n_elements(), 4, n);
  opA.rhs(u, 0.0, ra);
  opB.rhs(u, 0.0, rb);
  CHECK(std::memcmp(ra.flat().data(), rb.flat().data(),
                    sizeof(Real) * static_cast<size_t>(ra.flat().size())) == 0);
  for (Index e = 0; e < meshA.n_elements(); ++e)
    for (int lv = 0; lv < 3; ++lv) {
      CHECK((opA.grad_x(e, lv) == opB.grad_x(e, lv)));
      CHECK((opA.grad_y(e, lv) == opB.grad_y(e, lv)));
    }
}
