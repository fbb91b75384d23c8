#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dgflux/config.hpp"
#include "dgflux/types.hpp"

namespace dgflux {

// Space-time sampler of a registered problem in conserved variables. When an
// exact solution is known it doubles as initial data, Dirichlet boundary
// state, and error reference; otherwise eval is the initial field only and
// the time argument is ignored.
struct ProblemSolution {
  int nVars = 1;
  bool hasExact = false;
  std::function<Vector(const Vector2&, Real)> eval;
};

// Registered names: constant, sine-advection, isentropic-vortex, sod-line,
// shock-vortex. Problem parameters derive from the config (domain bounds,
// transport constants, gamma).
ProblemSolution make_solution(const std::string& name, const RunConfig& cfg);

std::vector<std::string> solution_names();
bool is_registered_solution(const std::string& name);

}  // namespace dgflux
