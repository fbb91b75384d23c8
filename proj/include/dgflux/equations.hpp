#pragma once

#include "dgflux/types.hpp"

namespace dgflux {

// Numerical surface flux at element interfaces. Central evaluates the
// configured two-point volume flux at the interface without dissipation.
enum class RiemannSolver { Rusanov, Hll, Roe, Central };

// Two-point volume flux used by the split form (and by the Central surface
// flux). StandardMean reproduces the standard DGSEM volume integral.
enum class TwoPointVariant { StandardMean, PirozzoliKEP, ChandrashekarEC };

// Linear advection-diffusion of a single scalar. Serves as the smoke-test
// system: every operator identity that holds here must hold for flow too.
struct ScalarAdvectionDiffusion {
  static constexpr int kVars = 1;
  static constexpr int kLiftVars = 1;
  using State = Eigen::Matrix<Real, 1, 1>;
  using Flux = Eigen::Matrix<Real, 1, 2>;
  using LiftState = Eigen::Matrix<Real, 1, 1>;
  using LiftGrad = Eigen::Matrix<Real, 1, 2>;

  Vector2 velocity{1.0, 1.0};
  Real diffusivity = 0.0;

  bool viscous() const { return diffusivity > 0.0; }
};

// 2D compressible flow with ideal-gas closure, in conserved variables
// (rho, rho u, rho v, rho E). mu == 0 gives the inviscid equations; mu > 0
// adds constant-viscosity Navier-Stokes stresses and Fourier heat flux with
// gas constant R = 1, so temperature is T = p / rho.
struct CompressibleFlow {
  static constexpr int kVars = 4;
  static constexpr int kLiftVars = 3;
  using State = Eigen::Matrix<Real, 4, 1>;
  using Flux = Eigen::Matrix<Real, 4, 2>;
  using LiftState = Eigen::Matrix<Real, 3, 1>;
  using LiftGrad = Eigen::Matrix<Real, 3, 2>;

  Real gamma = 1.4;
  Real mu = 0.0;
  Real prandtl = 0.72;

  bool viscous() const { return mu > 0.0; }
  Real heat_conductivity() const { return mu * gamma / ((gamma - 1.0) * prandtl); }
};

// ---- scalar advection-diffusion -------------------------------------------

void validate_state(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State& u);

// The scalar is its own primitive form; the identities keep reconstruction
// code generic over both systems.
ScalarAdvectionDiffusion::State cons_to_prim(const ScalarAdvectionDiffusion& eq,
                                             const ScalarAdvectionDiffusion::State& u);
ScalarAdvectionDiffusion::State prim_to_cons(const ScalarAdvectionDiffusion& eq,
                                             const ScalarAdvectionDiffusion::State& w);

ScalarAdvectionDiffusion::Flux physical_flux(const ScalarAdvectionDiffusion& eq,
                                             const ScalarAdvectionDiffusion::State& u);

ScalarAdvectionDiffusion::LiftState lifted_variables(const ScalarAdvectionDiffusion& eq,
                                                     const ScalarAdvectionDiffusion::State& u);

ScalarAdvectionDiffusion::Flux viscous_flux(const ScalarAdvectionDiffusion& eq,
                                            const ScalarAdvectionDiffusion::State& u,
                                            const ScalarAdvectionDiffusion::LiftGrad& grad);

Real max_wavespeed(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State& u,
                   const Vector2& normal);

Real viscous_scale(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State& u);

Real entropy(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State& u);

ScalarAdvectionDiffusion::State entropy_variables(const ScalarAdvectionDiffusion& eq,
                                                  const ScalarAdvectionDiffusion::State& u);

Vector2 entropy_potential(const ScalarAdvectionDiffusion& eq,
                          const ScalarAdvectionDiffusion::State& u);

ScalarAdvectionDiffusion::Flux two_point_flux(const ScalarAdvectionDiffusion& eq,
                                              TwoPointVariant variant,
                                              const ScalarAdvectionDiffusion::State& uL,
                                              const ScalarAdvectionDiffusion::State& uR);

ScalarAdvectionDiffusion::State riemann_flux(const ScalarAdvectionDiffusion& eq,
                                             RiemannSolver solver, TwoPointVariant variant,
                                             const ScalarAdvectionDiffusion::State& uL,
                                             const ScalarAdvectionDiffusion::State& uR,
                                             const Vector2& normal);

// ---- compressible flow -----------------------------------------------------

void validate_state(const CompressibleFlow& eq, const CompressibleFlow::State& U);

Real pressure(const CompressibleFlow& eq, const CompressibleFlow::State& U);

Real sound_speed(const CompressibleFlow& eq, const CompressibleFlow::State& U);

// (rho, u, v, p) <-> conserved. Both directions validate positivity.
CompressibleFlow::State cons_to_prim(const CompressibleFlow& eq, const CompressibleFlow::State& U);
CompressibleFlow::State prim_to_cons(const CompressibleFlow& eq, const CompressibleFlow::State& W);

CompressibleFlow::Flux physical_flux(const CompressibleFlow& eq, const CompressibleFlow::State& U);

// Variables whose gradients the viscous fluxes consume: (u, v, T).
CompressibleFlow::LiftState lifted_variables(const CompressibleFlow& eq,
                                             const CompressibleFlow::State& U);

CompressibleFlow::Flux viscous_flux(const CompressibleFlow& eq, const CompressibleFlow::State& U,
                                    const CompressibleFlow::LiftGrad& grad);

Real max_wavespeed(const CompressibleFlow& eq, const CompressibleFlow::State& U,
                   const Vector2& normal);

Real viscous_scale(const CompressibleFlow& eq, const CompressibleFlow::State& U);

// Mathematical entropy S = -rho s / (gamma - 1) with s = ln p - gamma ln rho.
Real entropy(const CompressibleFlow& eq, const CompressibleFlow::State& U);

CompressibleFlow::State entropy_variables(const CompressibleFlow& eq,
                                          const CompressibleFlow::State& U);

// Entropy potential psi_d = rho u_d satisfying psi_d = w . F_d - u_d S.
Vector2 entropy_potential(const CompressibleFlow& eq, const CompressibleFlow::State& U);

// Symmetric and consistent by construction; operands are ordered canonically
// before any arithmetic so F#(a,b) and F#(b,a) agree bitwise.
CompressibleFlow::Flux two_point_flux(const CompressibleFlow& eq, TwoPointVariant variant,
                                      const CompressibleFlow::State& uL,
                                      const CompressibleFlow::State& uR);

// Rotates both states into the normal frame, solves the 1D problem, rotates
// the flux back. Role-antisymmetric bitwise: f*(b, a, -n) == -f*(a, b, n).
CompressibleFlow::State riemann_flux(const CompressibleFlow& eq, RiemannSolver solver,
                                     TwoPointVariant variant, const CompressibleFlow::State& uL,
                                     const CompressibleFlow::State& uR, const Vector2& normal);

// ---- exact Riemann solution (reference oracle) -----------------------------

// Self-similar solution of the 1D Riemann problem for an ideal gas, used as
// an independent oracle for shock tube runs. Throws VacuumGenerated when the
// states expand into vacuum.
struct ExactRiemannSolution {
  Real gamma = 1.4;
  Real rhoL = 0, uL = 0, pL = 0;
  Real rhoR = 0, uR = 0, pR = 0;
  Real pStar = 0;
  Real uStar = 0;
  Real residual = 0;  // |f(pStar)| of the pressure function

  // Sample primitive state (rho, u, p) along the ray x/t = xi.
  Eigen::Vector3d sample(Real xi) const;
};

ExactRiemannSolution solve_exact_riemann(Real gamma, Real rhoL, Real uL, Real pL, Real rhoR,
                                         Real uR, Real pR);

}  // namespace dgflux
