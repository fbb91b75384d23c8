#include "dgflux/time_integration.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <cmath>
#include <random>
#include <sstream>

#include "dgflux/equations.hpp"
#include "dgflux/mesh.hpp"

namespace dgflux {

namespace {

// Expands the two-register recursion into Butcher arrays and checks first
// order consistency plus the advertised stage nodes.
void validate_scheme(const RkScheme& s) {
  const int ns = s.stages();
  if (ns == 0 || s.b.size() != s.a.size() || s.c.size() != s.a.size())
    throw ConfigError("malformed RK scheme " + s.name);
  if (s.a[0] != 0.0) throw ConfigError("RK scheme " + s.name + " must have a[0] = 0");
  std::vector<Real> r(ns, 0.0), w(ns, 0.0);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < i; ++j) r[j] *= s.a[i];
    r[i] = 1.0;
    if (std::abs(s.c[i] - std::accumulate(w.begin(), w.end(), 0.0)) > 1e-12)
      throw ConfigError("RK scheme " + s.name + " has inconsistent stage nodes");
    for (int j = 0; j <= i; ++j) w[j] += s.b[i] * r[j];
  }
  if (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) > 1e-12)
    throw ConfigError("RK scheme " + s.name + " weights do not sum to one");
}

RkScheme make_williamson3() {
  // three-stage third-order coefficients from Williamson (1980)
  RkScheme s;
  s.name = "williamson3";
  s.order = 3;
  s.a = {0.0, -5.0 / 9.0, -153.0 / 128.0};
  s.b = {1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0};
  s.c = {0.0, 1.0 / 3.0, 3.0 / 4.0};
  validate_scheme(s);
  return s;
}

RkScheme make_carpenter4() {
  // five-stage fourth-order coefficients from Carpenter and Kennedy (1994)
  RkScheme s;
  s.name = "carpenter4";
  s.order = 4;
  s.a = {0.0, -567301805773.0 / 1357537059087.0, -2404267990393.0 / 2016746695238.0,
         -3550918686646.0 / 2091501179385.0, -1275806237668.0 / 842570457699.0};
  s.b = {1432997174477.0 / 9575080441755.0, 5161836677717.0 / 13612068292357.0,
         1720146321549.0 / 2090206949498.0, 3134564353537.0 / 4481467310338.0,
         2277821191437.0 / 14882151754819.0};
  s.c = {0.0, 1432997174477.0 / 9575080441755.0, 2526269341429.0 / 6820363962896.0,
         2006345519317.0 / 3224310063776.0, 2802321613138.0 / 2924317926251.0};
  validate_scheme(s);
  return s;
}

}  // namespace

const RkScheme& rk_scheme(const std::string& name) {
  static const RkScheme williamson3 = make_williamson3();
  static const RkScheme carpenter4 = make_carpenter4();
  if (name == "williamson3") return williamson3;
  if (name == "carpenter4") return carpenter4;
  throw ConfigError("unknown RK scheme '" + name + "' (known: williamson3, carpenter4)");
}

RkIntegrator::RkIntegrator(RkScheme scheme, Index nElements, int nVars, Index nodesPerDir)
    : scheme_(std::move(scheme)),
      reg_(nElements, nVars, nodesPerDir),
      dudt_(nElements, nVars, nodesPerDir) {
  validate_scheme(scheme_);
}

void RkIntegrator::step(StateVector& u, Real t, Real dt, const RhsFunction& rhs) {
  const int ns = scheme_.stages();
  for (int i = 0; i < ns; ++i) {
    try {
      rhs(u, t + scheme_.c[i] * dt, dudt_);
    } catch (const NonPhysicalState& e) {
      throw NonPhysicalState(std::string(e.what()) + " (in RK stage " + std::to_string(i + 1) +
                             ")");
    } catch (const DgError& e) {
      throw DgError(std::string(e.what()) + " (in RK stage " + std::to_string(i + 1) + ")");
    }
    if (i == 0)
      reg_.flat() = dt * dudt_.flat();
    else
      reg_.flat() = scheme_.a[i] * reg_.flat() + dt * dudt_.flat();
    u.flat() += scheme_.b[i] * reg_.flat();
  }
}

Real TimestepFactors::gamma1_at(int degree) const {
  const auto it = gamma1.find(degree);
  return it == gamma1.end() ? 1.0 : it->second;
}

Real TimestepFactors::gamma2_at(int degree) const {
  const auto it = gamma2.find(degree);
  return it == gamma2.end() ? 1.0 : it->second;
}

Real global_min_reduce(const std::vector<Real>& values) {
  if (values.empty()) throw DgError("time-step reduction over zero partitions");
  return *std::min_element(values.begin(), values.end());
}

template <class System>
Real compute_dt(const SpatialOperator<System>& op, const StateVector& u,
                const TimestepFactors& factors) {
  if (factors.cfl <= 0.0 || factors.cflViscous <= 0.0)
    throw ConfigError("time-step factors must be positive");
  const Mesh& mesh = op.mesh();
  const NodalBasis& basis = op.basis();
  const System& eq = op.equations();
  const int deg = basis.degree;
  if (factors.gamma1_at(deg) <= 0.0 || factors.gamma1_at(0) <= 0.0 ||
      factors.gamma2_at(deg) <= 0.0)
    throw ConfigError("time-step factors must be positive");
  const Index n = basis.count();
  const Real scale = 2.0 * deg + 1.0;

  std::vector<Real> partMin(std::max(mesh.partitioning.count, 1),
                            std::numeric_limits<Real>::infinity());
  Real best = std::numeric_limits<Real>::infinity();
  Index bestElem = 0;

  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    Real dtElem = std::numeric_limits<Real>::infinity();
    for (int d = 0; d < 2; ++d) {
      Real dx = std::numeric_limits<Real>::infinity();
      Real lam = 0.0;
      for (Index idx = 0; idx < n * n; ++idx) {
        const Vector2 ja(el.metric(2 * d, idx), el.metric(2 * d + 1, idx));
        const Real len = ja.norm();
        dx = std::min(dx, 2.0 * el.jac[idx] / len);
        typename System::State q;
        for (int v = 0; v < System::kVars; ++v)
          q[v] = u.var(e, v)(idx % n, idx / n);
        lam = std::max(lam, max_wavespeed(eq, q, Vector2(ja / len)));
      }
      const bool fv = op.element_kinds()[e] == ElementKind::Fv;
      if (lam > 0.0) {
        const Real dtc =
            fv ? factors.cfl * factors.gamma1_at(0) * (dx / static_cast<Real>(n)) / lam
               : factors.cfl * factors.gamma1_at(deg) * dx / (lam * scale);
        dtElem = std::min(dtElem, dtc);
      }
      if (!fv && eq.viscous()) {
        Real visc = 0.0;
        for (Index idx = 0; idx < n * n; ++idx) {
          typename System::State q;
          for (int v = 0; v < System::kVars; ++v)
            q[v] = u.var(e, v)(idx % n, idx / n);
          visc = std::max(visc, viscous_scale(eq, q));
        }
        if (visc > 0.0)
          dtElem = std::min(dtElem, factors.cflViscous * factors.gamma2_at(deg) * dx * dx /
                                        (visc * scale));
      }
    }
    const int part = mesh.partitioning.owner(e);
    partMin[part] = std::min(partMin[part], dtElem);
    if (dtElem < best) {
      best = dtElem;
      bestElem = e;
    }
  }

  const Real dt = global_min_reduce(partMin);
  if (!std::isfinite(dt))
    throw DgError("time step unbounded: no convective or viscous signal anywhere");
  if (dt < 1e-14) {
    std::ostringstream msg;
    msg << "time step underflow (" << dt << ") limited by element " << bestElem;
    throw DgError(msg.str());
  }
  return dt;
}

template Real compute_dt<ScalarAdvectionDiffusion>(
    const SpatialOperator<ScalarAdvectionDiffusion>&, const StateVector&,
    const TimestepFactors&);
template Real compute_dt<CompressibleFlow>(const SpatialOperator<CompressibleFlow>&,
                                           const StateVector&, const TimestepFactors&);

Real calibrate_cfl(int degree, NodeFamily family, const RkScheme& scheme) {
  GenerateParams p;
  p.nx = 8;
  p.ny = 1;
  p.x1 = 8.0;
  p.periodicX = true;
  p.periodicY = true;
  Mesh mesh = generate_cartesian(p);
  const NodalBasis basis = build_basis(degree, family);
  compute_metrics(mesh, basis);
  const Index n = basis.count();

  ScalarAdvectionDiffusion eq;
  eq.velocity = Vector2(1.0, 0.0);
  SpatialOperator<ScalarAdvectionDiffusion> op(mesh, basis, eq, {}, {});
  RkIntegrator integrator(scheme, mesh.n_elements(), 1, n);
  const RhsFunction rhs = [&](const StateVector& q, Real t, StateVector& dq) {
    op.rhs(q, t, dq);
  };

  StateVector u0(mesh.n_elements(), 1, n);
  std::mt19937 rng(2027);
  std::uniform_real_distribution<Real> dist(-1.0, 1.0);
  for (Index k = 0; k < u0.flat().size(); ++k) u0.flat()[k] = dist(rng);
  const Real bound = u0.flat().cwiseAbs().maxCoeff() * 10.0;

  // unit elements, unit speed: the factor-free bound is 1/(2N+1)
  const auto stable = [&](Real cfl) {
    const Real dt = cfl / (2.0 * degree + 1.0);
    StateVector u = u0;
    for (int s = 0; s < 200; ++s) {
      integrator.step(u, s * dt, dt, rhs);
      if (!u.flat().allFinite() || u.flat().cwiseAbs().maxCoeff() > bound) return false;
    }
    return true;
  };

  Real lo = 0.0, hi = 1.0;
  while (stable(hi) && hi < 16.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 25; ++it) {
    const Real mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace dgflux
