#include <cmath>

#include "dgflux/equations.hpp"

// Self-similar solution of the ideal-gas Riemann problem: Newton iteration on
// the star pressure, then case analysis over shocks and rarefaction fans.
// This is a reference oracle, not a building block of the solver.

namespace dgflux {

namespace {

struct PressureFn {
  Real f, df;
};

// Contribution of one side to the star-pressure equation f(p) + du = 0.
PressureFn side_fn(Real gamma, Real p, Real rhoK, Real pK, Real aK) {
  PressureFn out;
  if (p > pK) {
    // shock branch
    const Real A = 2.0 / ((gamma + 1.0) * rhoK);
    const Real B = (gamma - 1.0) / (gamma + 1.0) * pK;
    const Real root = std::sqrt(A / (p + B));
    out.f = (p - pK) * root;
    out.df = root * (1.0 - 0.5 * (p - pK) / (p + B));
  } else {
    // rarefaction branch
    const Real ex = (gamma - 1.0) / (2.0 * gamma);
    out.f = 2.0 * aK / (gamma - 1.0) * (std::pow(p / pK, ex) - 1.0);
    out.df = std::pow(p / pK, -(gamma + 1.0) / (2.0 * gamma)) / (rhoK * aK);
  }
  return out;
}

}  // namespace

ExactRiemannSolution solve_exact_riemann(Real gamma, Real rhoL, Real uL, Real pL, Real rhoR,
                                         Real uR, Real pR) {
  if (!(rhoL > 0.0) || !(pL > 0.0) || !(rhoR > 0.0) || !(pR > 0.0))
    throw NonPhysicalState("exact Riemann solver requires positive density and pressure");

  ExactRiemannSolution sol;
  sol.gamma = gamma;
  sol.rhoL = rhoL;
  sol.uL = uL;
  sol.pL = pL;
  sol.rhoR = rhoR;
  sol.uR = uR;
  sol.pR = pR;

  const Real aL = std::sqrt(gamma * pL / rhoL);
  const Real aR = std::sqrt(gamma * pR / rhoR);
  const Real du = uR - uL;
  if (2.0 * (aL + aR) / (gamma - 1.0) <= du)
    throw VacuumGenerated("states expand into vacuum, no star region exists");

  // Primitive-variable guess, floored to stay in the domain of f.
  Real p = 0.5 * (pL + pR) - 0.125 * du * (rhoL + rhoR) * (aL + aR);
  p = std::max(p, 1.0e-14 * std::min(pL, pR));
  for (int it = 0; it < 200; ++it) {
    const PressureFn fL = side_fn(gamma, p, rhoL, pL, aL);
    const PressureFn fR = side_fn(gamma, p, rhoR, pR, aR);
    const Real f = fL.f + fR.f + du;
    Real next = p - f / (fL.df + fR.df);
    if (next <= 0.0) next = 0.5 * p;
    const Real change = std::abs(next - p) / (0.5 * (next + p));
    p = next;
    if (change < 1.0e-15) break;
  }
  sol.pStar = p;
  const PressureFn fL = side_fn(gamma, p, rhoL, pL, aL);
  const PressureFn fR = side_fn(gamma, p, rhoR, pR, aR);
  sol.uStar = 0.5 * (uL + uR) + 0.5 * (fR.f - fL.f);
  sol.residual = std::abs(fL.f + fR.f + du);
  return sol;
}

Eigen::Vector3d ExactRiemannSolution::sample(Real xi) const {
  const Real g = gamma;
  const Real aL = std::sqrt(g * pL / rhoL);
  const Real aR = std::sqrt(g * pR / rhoR);
  const Real gm = (g - 1.0) / (g + 1.0);

  if (xi <= uStar) {
    if (pStar > pL) {
      const Real sL = uL - aL * std::sqrt((g + 1.0) / (2.0 * g) * pStar / pL +
                                          (g - 1.0) / (2.0 * g));
      if (xi <= sL) return {rhoL, uL, pL};
      const Real rho = rhoL * (pStar / pL + gm) / (gm * pStar / pL + 1.0);
      return {rho, uStar, pStar};
    }
    const Real aStar = aL * std::pow(pStar / pL, (g - 1.0) / (2.0 * g));
    if (xi <= uL - aL) return {rhoL, uL, pL};
    if (xi >= uStar - aStar) return {rhoL * std::pow(pStar / pL, 1.0 / g), uStar, pStar};
    const Real u = 2.0 / (g + 1.0) * (aL + 0.5 * (g - 1.0) * uL + xi);
    const Real a = 2.0 / (g + 1.0) * (aL + 0.5 * (g - 1.0) * (uL - xi));
    return {rhoL * std::pow(a / aL, 2.0 / (g - 1.0)), u, pL * std::pow(a / aL, 2.0 * g / (g - 1.0))};
  }

  if (pStar > pR) {
    const Real sR =
        uR + aR * std::sqrt((g + 1.0) / (2.0 * g) * pStar / pR + (g - 1.0) / (2.0 * g));
    if (xi >= sR) return {rhoR, uR, pR};
    const Real rho = rhoR * (pStar / pR + gm) / (gm * pStar / pR + 1.0);
    return {rho, uStar, pStar};
  }
  const Real aStar = aR * std::pow(pStar / pR, (g - 1.0) / (2.0 * g));
  if (xi >= uR + aR) return {rhoR, uR, pR};
  if (xi <= uStar + aStar) return {rhoR * std::pow(pStar / pR, 1.0 / g), uStar, pStar};
  const Real u = 2.0 / (g + 1.0) * (-aR + 0.5 * (g - 1.0) * uR + xi);
  const Real a = 2.0 / (g + 1.0) * (aR - 0.5 * (g - 1.0) * (uR - xi));
  return {rhoR * std::pow(a / aR, 2.0 / (g - 1.0)), u, pR * std::pow(a / aR, 2.0 * g / (g - 1.0))};
}

}  // namespace dgflux
