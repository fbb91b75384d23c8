#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"

namespace dgflux {

// Two-register low-storage Runge-Kutta coefficients: per stage
// R <- a_i R + dt rhs(u), u <- u + b_i R, evaluated at t + c_i dt.
struct RkScheme {
  std::string name;
  int order = 0;
  std::vector<Real> a, b, c;

  int stages() const { return static_cast<int>(a.size()); }
};

// Registered schemes: "williamson3" and "carpenter4". The returned reference
// has validated coefficients (a[0] = 0, unit weight sum, consistent nodes).
const RkScheme& rk_scheme(const std::string& name);

using RhsFunction = std::function<void(const StateVector&, Real, StateVector&)>;

// Owns the only two field-sized work vectors of the integration (the stage
// register and the time derivative); step allocates nothing.
class RkIntegrator {
 public:
  RkIntegrator(RkScheme scheme, Index nElements, int nVars, Index nodesPerDir);

  // Advances u in place from t to t + dt.
  void step(StateVector& u, Real t, Real dt, const RhsFunction& rhs);

  const RkScheme& scheme() const { return scheme_; }

 private:
  RkScheme scheme_;
  StateVector reg_;
  StateVector dudt_;
};

// User time-step scalars plus per-degree stability correction factors.
// Factors default to 1 for every degree; entries in the tables override.
struct TimestepFactors {
  Real cfl = 1.0;
  Real cflViscous = 1.0;
  std::map<int, Real> gamma1;
  std::map<int, Real> gamma2;

  Real gamma1_at(int degree) const;
  Real gamma2_at(int degree) const;
};

// Exact minimum of per-partition candidates; deterministic for any grouping.
Real global_min_reduce(const std::vector<Real>& values);

// Global explicit time-step bound. Per element and reference direction the
// convective bound is cfl g1(N) dx / (lambda (2N+1)) with the directional
// size dx = 2 min over nodes of J/|Ja^d|; viscous systems add
// cflViscous g2(N) dx^2 / (lambdaVisc (2N+1)). Subcell elements advance on
// their own grid: cfl g1(0) (dx/(N+1)) / lambda. Throws DgError naming the
// limiting element when the bound falls below 1e-14.
template <class System>
Real compute_dt(const SpatialOperator<System>& op, const StateVector& u,
                const TimestepFactors& factors);

// Empirical stability factor of a scheme: bisects the largest stable CFL for
// 1D advection at the given degree, with the step computed from the
// factor-free bound. The result is the measured gamma1 correction.
Real calibrate_cfl(int degree, NodeFamily family, const RkScheme& scheme);

}  // namespace dgflux
