#include "dgflux/equations.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace dgflux {

namespace {

// Logarithmic mean with a series expansion near a == b (Ismail-Roe form).
Real log_mean(Real a, Real b) {
  const Real f = (a - b) / (a + b);
  const Real u = f * f;
  Real slope;
  if (u < 1.0e-4) {
    slope = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
  } else {
    slope = std::log(a / b) / (2.0 * f);
  }
  return (a + b) / (2.0 * slope);
}

[[noreturn]] void throw_nonphysical(const char* what, Real rho, Real p) {
  throw NonPhysicalState(std::string(what) + " (rho = " + std::to_string(rho) +
                         ", p = " + std::to_string(p) + ")");
}

}  // namespace

// ---- scalar advection-diffusion -------------------------------------------

void validate_state(const ScalarAdvectionDiffusion&, const ScalarAdvectionDiffusion::State& u) {
  if (!std::isfinite(u[0])) throw NonPhysicalState("scalar state is not finite");
}

ScalarAdvectionDiffusion::Flux physical_flux(const ScalarAdvectionDiffusion& eq,
                                             const ScalarAdvectionDiffusion::State& u) {
  ScalarAdvectionDiffusion::Flux f;
  f(0, 0) = eq.velocity.x() * u[0];
  f(0, 1) = eq.velocity.y() * u[0];
  return f;
}

ScalarAdvectionDiffusion::LiftState lifted_variables(const ScalarAdvectionDiffusion&,
                                                     const ScalarAdvectionDiffusion::State& u) {
  return u;
}

ScalarAdvectionDiffusion::State cons_to_prim(const ScalarAdvectionDiffusion&,
                                             const ScalarAdvectionDiffusion::State& u) {
  return u;
}

ScalarAdvectionDiffusion::State prim_to_cons(const ScalarAdvectionDiffusion&,
                                             const ScalarAdvectionDiffusion::State& w) {
  return w;
}

ScalarAdvectionDiffusion::Flux viscous_flux(const ScalarAdvectionDiffusion& eq,
                                            const ScalarAdvectionDiffusion::State&,
                                            const ScalarAdvectionDiffusion::LiftGrad& grad) {
  return eq.diffusivity * grad;
}

Real max_wavespeed(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State&,
                   const Vector2& normal) {
  return std::abs(eq.velocity.x() * normal.x() + eq.velocity.y() * normal.y());
}

Real viscous_scale(const ScalarAdvectionDiffusion& eq, const ScalarAdvectionDiffusion::State&) {
  return eq.diffusivity;
}

Real entropy(const ScalarAdvectionDiffusion&, const ScalarAdvectionDiffusion::State& u) {
  return 0.5 * u[0] * u[0];
}

ScalarAdvectionDiffusion::State entropy_variables(const ScalarAdvectionDiffusion&,
                                                  const ScalarAdvectionDiffusion::State& u) {
  return u;
}

Vector2 entropy_potential(const ScalarAdvectionDiffusion& eq,
                          const ScalarAdvectionDiffusion::State& u) {
  return eq.velocity * (0.5 * u[0] * u[0]);
}

ScalarAdvectionDiffusion::Flux two_point_flux(const ScalarAdvectionDiffusion& eq, TwoPointVariant,
                                              const ScalarAdvectionDiffusion::State& uL,
                                              const ScalarAdvectionDiffusion::State& uR) {
  // The flux is linear, so every split variant collapses to the plain mean.
  const Real avg = 0.5 * (uL[0] + uR[0]);
  ScalarAdvectionDiffusion::Flux f;
  f(0, 0) = eq.velocity.x() * avg;
  f(0, 1) = eq.velocity.y() * avg;
  return f;
}

ScalarAdvectionDiffusion::State riemann_flux(const ScalarAdvectionDiffusion& eq,
                                             RiemannSolver solver, TwoPointVariant,
                                             const ScalarAdvectionDiffusion::State& uL,
                                             const ScalarAdvectionDiffusion::State& uR,
                                             const Vector2& normal) {
  const Real an = eq.velocity.x() * normal.x() + eq.velocity.y() * normal.y();
  ScalarAdvectionDiffusion::State f;
  const Real mean = 0.5 * (an * (uL[0] + uR[0]));
  if (solver == RiemannSolver::Central) {
    f[0] = mean;
    return f;
  }
  // Upwinding written as mean minus dissipation keeps the role swap
  // (uL, uR, n) -> (uR, uL, -n) an exact negation in floating point.
  f[0] = mean - 0.5 * std::abs(an) * (uR[0] - uL[0]);
  return f;
}

// ---- compressible flow -----------------------------------------------------

Real pressure(const CompressibleFlow& eq, const CompressibleFlow::State& U) {
  const Real kinetic = 0.5 * (U[1] * U[1] + U[2] * U[2]) / U[0];
  return (eq.gamma - 1.0) * (U[3] - kinetic);
}

void validate_state(const CompressibleFlow& eq, const CompressibleFlow::State& U) {
  if (!U.allFinite()) throw NonPhysicalState("flow state is not finite");
  if (!(U[0] > 0.0)) throw_nonphysical("non-positive density", U[0], 0.0);
  const Real p = pressure(eq, U);
  if (!(p > 0.0)) throw_nonphysical("non-positive pressure", U[0], p);
}

Real sound_speed(const CompressibleFlow& eq, const CompressibleFlow::State& U) {
  const Real p = pressure(eq, U);
  if (!(U[0] > 0.0) || !(p > 0.0)) throw_nonphysical("sound speed undefined", U[0], p);
  return std::sqrt(eq.gamma * p / U[0]);
}

CompressibleFlow::State cons_to_prim(const CompressibleFlow& eq,
                                     const CompressibleFlow::State& U) {
  if (!(U[0] > 0.0)) throw_nonphysical("non-positive density", U[0], 0.0);
  const Real p = pressure(eq, U);
  if (!(p > 0.0)) throw_nonphysical("non-positive pressure", U[0], p);
  CompressibleFlow::State W;
  W << U[0], U[1] / U[0], U[2] / U[0], p;
  return W;
}

CompressibleFlow::State prim_to_cons(const CompressibleFlow& eq,
                                     const CompressibleFlow::State& W) {
  if (!(W[0] > 0.0) || !(W[3] > 0.0)) throw_nonphysical("non-physical primitives", W[0], W[3]);
  CompressibleFlow::State U;
  U << W[0], W[0] * W[1], W[0] * W[2],
      W[3] / (eq.gamma - 1.0) + 0.5 * W[0] * (W[1] * W[1] + W[2] * W[2]);
  return U;
}

CompressibleFlow::Flux physical_flux(const CompressibleFlow& eq,
                                     const CompressibleFlow::State& U) {
  const Real p = pressure(eq, U);
  const Real u = U[1] / U[0];
  const Real v = U[2] / U[0];
  CompressibleFlow::Flux f;
  f(0, 0) = U[1];
  f(1, 0) = U[1] * u + p;
  f(2, 0) = U[2] * u;
  f(3, 0) = u * (U[3] + p);
  f(0, 1) = U[2];
  f(1, 1) = U[1] * v;
  f(2, 1) = U[2] * v + p;
  f(3, 1) = v * (U[3] + p);
  return f;
}

CompressibleFlow::LiftState lifted_variables(const CompressibleFlow& eq,
                                             const CompressibleFlow::State& U) {
  const Real p = pressure(eq, U);
  CompressibleFlow::LiftState q;
  q << U[1] / U[0], U[2] / U[0], p / U[0];
  return q;
}

CompressibleFlow::Flux viscous_flux(const CompressibleFlow& eq, const CompressibleFlow::State& U,
                                    const CompressibleFlow::LiftGrad& grad) {
  const Real u = U[1] / U[0];
  const Real v = U[2] / U[0];
  const Real ux = grad(0, 0), uy = grad(0, 1);
  const Real vx = grad(1, 0), vy = grad(1, 1);
  const Real tauXx = eq.mu * (4.0 / 3.0 * ux - 2.0 / 3.0 * vy);
  const Real tauYy = eq.mu * (4.0 / 3.0 * vy - 2.0 / 3.0 * ux);
  const Real tauXy = eq.mu * (uy + vx);
  const Real k = eq.heat_conductivity();
  CompressibleFlow::Flux f;
  f(0, 0) = 0.0;
  f(1, 0) = tauXx;
  f(2, 0) = tauXy;
  f(3, 0) = u * tauXx + v * tauXy + k * grad(2, 0);
  f(0, 1) = 0.0;
  f(1, 1) = tauXy;
  f(2, 1) = tauYy;
  f(3, 1) = u * tauXy + v * tauYy + k * grad(2, 1);
  return f;
}

Real max_wavespeed(const CompressibleFlow& eq, const CompressibleFlow::State& U,
                   const Vector2& normal) {
  const Real un = (U[1] * normal.x() + U[2] * normal.y()) / U[0];
  return std::abs(un) + sound_speed(eq, U);
}

Real viscous_scale(const CompressibleFlow& eq, const CompressibleFlow::State& U) {
  if (!(U[0] > 0.0)) throw_nonphysical("non-positive density", U[0], 0.0);
  return std::max(4.0 * eq.mu / (3.0 * U[0]), eq.gamma * eq.mu / (eq.prandtl * U[0]));
}

Real entropy(const CompressibleFlow& eq, const CompressibleFlow::State& U) {
  const Real p = pressure(eq, U);
  if (!(U[0] > 0.0) || !(p > 0.0)) throw_nonphysical("entropy undefined", U[0], p);
  const Real s = std::log(p) - eq.gamma * std::log(U[0]);
  return -U[0] * s / (eq.gamma - 1.0);
}

CompressibleFlow::State entropy_variables(const CompressibleFlow& eq,
                                          const CompressibleFlow::State& U) {
  const CompressibleFlow::State W = cons_to_prim(eq, U);
  const Real s = std::log(W[3]) - eq.gamma * std::log(W[0]);
  const Real beta = W[0] / (2.0 * W[3]);
  CompressibleFlow::State w;
  w << (eq.gamma - s) / (eq.gamma - 1.0) - beta * (W[1] * W[1] + W[2] * W[2]),
      2.0 * beta * W[1], 2.0 * beta * W[2], -2.0 * beta;
  return w;
}

Vector2 entropy_potential(const CompressibleFlow&, const CompressibleFlow::State& U) {
  return Vector2(U[1], U[2]);
}

namespace {

CompressibleFlow::Flux standard_mean_flux(const CompressibleFlow& eq,
                                          const CompressibleFlow::State& a,
                                          const CompressibleFlow::State& b) {
  return 0.5 * (physical_flux(eq, a) + physical_flux(eq, b));
}

CompressibleFlow::Flux pirozzoli_flux(const CompressibleFlow& eq,
                                      const CompressibleFlow::State& a,
                                      const CompressibleFlow::State& b) {
  const CompressibleFlow::State wa = cons_to_prim(eq, a);
  const CompressibleFlow::State wb = cons_to_prim(eq, b);
  const Real rho = 0.5 * (wa[0] + wb[0]);
  const Real u = 0.5 * (wa[1] + wb[1]);
  const Real v = 0.5 * (wa[2] + wb[2]);
  const Real p = 0.5 * (wa[3] + wb[3]);
  const Real h = 0.5 * ((a[3] + wa[3]) / wa[0] + (b[3] + wb[3]) / wb[0]);
  CompressibleFlow::Flux f;
  f(0, 0) = rho * u;
  f(1, 0) = rho * u * u + p;
  f(2, 0) = rho * u * v;
  f(3, 0) = rho * u * h;
  f(0, 1) = rho * v;
  f(1, 1) = rho * u * v;
  f(2, 1) = rho * v * v + p;
  f(3, 1) = rho * v * h;
  return f;
}

CompressibleFlow::Flux chandrashekar_flux(const CompressibleFlow& eq,
                                          const CompressibleFlow::State& a,
                                          const CompressibleFlow::State& b) {
  const CompressibleFlow::State wa = cons_to_prim(eq, a);
  const CompressibleFlow::State wb = cons_to_prim(eq, b);
  const Real betaA = wa[0] / (2.0 * wa[3]);
  const Real betaB = wb[0] / (2.0 * wb[3]);
  const Real rhoHat = log_mean(wa[0], wb[0]);
  const Real betaHat = log_mean(betaA, betaB);
  const Real rhoBar = 0.5 * (wa[0] + wb[0]);
  const Real betaBar = 0.5 * (betaA + betaB);
  const Real u = 0.5 * (wa[1] + wb[1]);
  const Real v = 0.5 * (wa[2] + wb[2]);
  const Real u2 = 0.5 * (wa[1] * wa[1] + wb[1] * wb[1]);
  const Real v2 = 0.5 * (wa[2] * wa[2] + wb[2] * wb[2]);
  const Real pTilde = rhoBar / (2.0 * betaBar);
  const Real bracket = 1.0 / (2.0 * (eq.gamma - 1.0) * betaHat) - 0.5 * (u2 + v2);
  CompressibleFlow::Flux f;
  f(0, 0) = rhoHat * u;
  f(1, 0) = u * f(0, 0) + pTilde;
  f(2, 0) = v * f(0, 0);
  f(3, 0) = bracket * f(0, 0) + u * f(1, 0) + v * f(2, 0);
  f(0, 1) = rhoHat * v;
  f(1, 1) = u * f(0, 1);
  f(2, 1) = v * f(0, 1) + pTilde;
  f(3, 1) = bracket * f(0, 1) + u * f(1, 1) + v * f(2, 1);
  return f;
}

}  // namespace

CompressibleFlow::Flux two_point_flux(const CompressibleFlow& eq, TwoPointVariant variant,
                                      const CompressibleFlow::State& uL,
                                      const CompressibleFlow::State& uR) {
  // Order the operands canonically so both argument orders run the exact
  // same arithmetic; symmetry then holds bitwise, not just analytically.
  const CompressibleFlow::State* a = &uL;
  const CompressibleFlow::State* b = &uR;
  for (int i = 0; i < CompressibleFlow::kVars; ++i) {
    if ((*a)[i] != (*b)[i]) {
      if ((*a)[i] > (*b)[i]) std::swap(a, b);
      break;
    }
  }
  switch (variant) {
    case TwoPointVariant::StandardMean:
      return standard_mean_flux(eq, *a, *b);
    case TwoPointVariant::PirozzoliKEP:
      return pirozzoli_flux(eq, *a, *b);
    case TwoPointVariant::ChandrashekarEC:
      return chandrashekar_flux(eq, *a, *b);
  }
  throw DgError("unknown two-point flux variant");
}

}  // namespace dgflux
