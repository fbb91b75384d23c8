#include <cmath>

#include "dgflux/equations.hpp"

// Interface fluxes for compressible flow. All solvers rotate both states into
// the frame of the normal, solve a 1D problem in (rho, rho un, rho ut, E),
// and rotate the momentum flux back with t = (-ny, nx).
//
// Every formula below is arranged so that swapping the roles of the two
// states while negating the normal yields the exact IEEE negation of the
// flux. That requires commutative sums, differences used as exact negations,
// and (for Roe) summing the two acoustic dissipation terms before the
// entropy and shear terms, because their coefficients swap into each other
// under the role exchange.

namespace dgflux {

namespace {

using State = CompressibleFlow::State;

// State seen in the normal frame plus derived thermodynamic quantities.
struct Rotated {
  Real rho, un, ut, E, p, a, H;
};

Rotated rotate_in(const CompressibleFlow& eq, const State& U, const Vector2& n) {
  Rotated r;
  r.rho = U[0];
  r.un = (U[1] * n.x() + U[2] * n.y()) / U[0];
  r.ut = (U[1] * -n.y() + U[2] * n.x()) / U[0];
  r.E = U[3];
  r.p = pressure(eq, U);
  if (!(r.rho > 0.0) || !(r.p > 0.0))
    throw NonPhysicalState("non-physical state entering Riemann solver");
  r.a = std::sqrt(eq.gamma * r.p / r.rho);
  r.H = (r.E + r.p) / r.rho;
  return r;
}

// 1D flux in the normal frame, components (rho, mn, mt, E).
State flux_1d(const Rotated& r) {
  State f;
  f[0] = r.rho * r.un;
  f[1] = f[0] * r.un + r.p;
  f[2] = f[0] * r.ut;
  f[3] = r.un * (r.E + r.p);
  return f;
}

// Conserved state in the normal frame.
State cons_1d(const Rotated& r) {
  State q;
  q[0] = r.rho;
  q[1] = r.rho * r.un;
  q[2] = r.rho * r.ut;
  q[3] = r.E;
  return q;
}

State rotate_out(const State& f, const Vector2& n) {
  State out;
  out[0] = f[0];
  out[1] = f[1] * n.x() + f[2] * -n.y();
  out[2] = f[1] * n.y() + f[2] * n.x();
  out[3] = f[3];
  return out;
}

State rusanov_1d(const Rotated& L, const Rotated& R) {
  const Real lam = std::max(std::abs(L.un) + L.a, std::abs(R.un) + R.a);
  const State fL = flux_1d(L);
  const State fR = flux_1d(R);
  const State qL = cons_1d(L);
  const State qR = cons_1d(R);
  State f;
  for (int k = 0; k < 4; ++k) f[k] = 0.5 * (fL[k] + fR[k]) - 0.5 * lam * (qR[k] - qL[k]);
  return f;
}

State hll_1d(const Rotated& L, const Rotated& R) {
  const Real sL = std::min(L.un - L.a, R.un - R.a);
  const Real sR = std::max(L.un + L.a, R.un + R.a);
  const State fL = flux_1d(L);
  const State fR = flux_1d(R);
  // The two supersonic branches must mirror exactly under the role swap,
  // hence >= against <= rather than a strict/non-strict mixture.
  if (sL >= 0.0) return fL;
  if (sR <= 0.0) return fR;
  const State qL = cons_1d(L);
  const State qR = cons_1d(R);
  State f;
  for (int k = 0; k < 4; ++k)
    f[k] = (sR * fL[k] - sL * fR[k] + (sL * sR) * (qR[k] - qL[k])) / (sR - sL);
  return f;
}

State roe_1d(const CompressibleFlow& eq, const Rotated& L, const Rotated& R) {
  const Real sqL = std::sqrt(L.rho);
  const Real sqR = std::sqrt(R.rho);
  const Real wsum = sqL + sqR;
  const Real un = (sqL * L.un + sqR * R.un) / wsum;
  const Real ut = (sqL * L.ut + sqR * R.ut) / wsum;
  const Real H = (sqL * L.H + sqR * R.H) / wsum;
  const Real q2 = un * un + ut * ut;
  const Real a2 = (eq.gamma - 1.0) * (H - 0.5 * q2);
  if (!(a2 > 0.0)) throw NonPhysicalState("Roe average adjacent to vacuum");
  const Real a = std::sqrt(a2);
  const Real rho = sqL * sqR;

  const Real dp = R.p - L.p;
  const Real dun = R.un - L.un;
  const Real dut = R.ut - L.ut;
  const Real drho = R.rho - L.rho;
  const Real alpha1 = (dp - rho * a * dun) / (2.0 * a2);
  const Real alpha2 = drho - dp / a2;
  const Real alpha3 = rho * dut;
  const Real alpha4 = (dp + rho * a * dun) / (2.0 * a2);

  // Harten-Hyman smoothing of the acoustic eigenvalues only; the linearly
  // degenerate fields keep |un| so a stationary contact stays dissipation-free.
  const Real delta = 0.05 * a;
  const auto fix = [delta](Real lam) {
    const Real mag = std::abs(lam);
    return mag < delta ? (lam * lam + delta * delta) / (2.0 * delta) : mag;
  };
  const Real l1 = fix(un - a);
  const Real l2 = std::abs(un);
  const Real l4 = fix(un + a);

  // Acoustic pair first: alpha1/alpha4 and their eigenvectors swap into each
  // other under the role exchange, so their sum must be formed before the
  // remaining terms to keep the accumulated value an exact negation.
  State diss;
  diss[0] = (alpha1 * l1 + alpha4 * l4) + alpha2 * l2;
  diss[1] = (alpha1 * l1 * (un - a) + alpha4 * l4 * (un + a)) + alpha2 * l2 * un;
  diss[2] = (alpha1 * l1 * ut + alpha4 * l4 * ut) + (alpha2 * l2 * ut + alpha3 * l2);
  diss[3] = (alpha1 * l1 * (H - un * a) + alpha4 * l4 * (H + un * a)) +
            (alpha2 * l2 * (0.5 * q2) + alpha3 * l2 * ut);

  const State fL = flux_1d(L);
  const State fR = flux_1d(R);
  State f;
  for (int k = 0; k < 4; ++k) f[k] = 0.5 * (fL[k] + fR[k]) - 0.5 * diss[k];
  return f;
}

}  // namespace

CompressibleFlow::State riemann_flux(const CompressibleFlow& eq, RiemannSolver solver,
                                     TwoPointVariant variant, const CompressibleFlow::State& uL,
                                     const CompressibleFlow::State& uR, const Vector2& normal) {
  if (solver == RiemannSolver::Central) {
    validate_state(eq, uL);
    validate_state(eq, uR);
    const CompressibleFlow::Flux f = two_point_flux(eq, variant, uL, uR);
    State out;
    for (int k = 0; k < 4; ++k) out[k] = f(k, 0) * normal.x() + f(k, 1) * normal.y();
    return out;
  }
  const Rotated L = rotate_in(eq, uL, normal);
  const Rotated R = rotate_in(eq, uR, normal);
  State f;
  switch (solver) {
    case RiemannSolver::Rusanov:
      f = rusanov_1d(L, R);
      break;
    case RiemannSolver::Hll:
      f = hll_1d(L, R);
      break;
    case RiemannSolver::Roe:
      f = roe_1d(eq, L, R);
      break;
    default:
      throw DgError("unknown Riemann solver");
  }
  return rotate_out(f, normal);
}

}  // namespace dgflux
