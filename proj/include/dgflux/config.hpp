#pragma once

#include <map>
#include <string>

#include "dgflux/dg_operator.hpp"
#include "dgflux/types.hpp"

namespace dgflux {

enum class SystemKind { Scalar, Euler, NavierStokes };

// One run, fully described. Parsed from ini-style `key = value` text; the
// defaults make an empty file a valid scalar smoke run. A mesh file path
// takes precedence over the generation parameters.
struct RunConfig {
  std::string meshFile;
  Index nx = 4, ny = 4;
  Real x0 = 0.0, x1 = 1.0;
  Real y0 = 0.0, y1 = 1.0;
  int ngeo = 1;
  bool periodicX = true;
  bool periodicY = true;
  std::string curving = "none";  // none | sine
  Real curveAmplitude = 0.08;

  SystemKind system = SystemKind::Scalar;
  Real velocityX = 1.0, velocityY = 1.0;
  Real diffusivity = 0.0;
  Real gamma = 1.4;
  Real mu = 0.0;
  Real prandtl = 0.72;

  int degree = 3;
  NodeFamily nodes = NodeFamily::LegendreGaussLobatto;
  Form form = Form::Weak;
  RiemannSolver riemann = RiemannSolver::Rusanov;
  TwoPointVariant volumeFlux = TwoPointVariant::StandardMean;
  bool lifting = false;  // BR1 gradients; required whenever mu/diffusivity > 0

  bool fv = false;  // subcell shock capturing
  IndicatorKind indicator = IndicatorKind::PerssonModal;
  Real indicatorUpper = -3.0;
  Real indicatorLower = -4.5;
  SlopeLimiter limiter = SlopeLimiter::Minmod;

  std::string scheme = "carpenter4";
  Real cfl = 0.5;
  Real cflViscous = 0.5;

  Real tEnd = 1.0;
  Real analysisInterval = 0.0;  // 0: analysis only at the start and the end
  Real outputInterval = 0.0;    // 0: no intermediate checkpoints
  std::string outputPrefix;     // empty: nothing is written to disk
  std::string initial = "sine-advection";
  std::string restartFrom;  // checkpoint path; empty starts from the initial state
  int partitions = 1;

  std::map<int, std::string> boundary;  // bc tag -> kind token (bc<tag> keys)

  bool operator==(const RunConfig&) const = default;
};

// Total parse: every line is either consumed or a line-numbered ConfigError.
// Unknown keys are errors, later duplicates win, validation runs last.
RunConfig parse_config(const std::string& text);

// Emits every key explicitly; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

IndicatorConfig indicator_config(const RunConfig& cfg);
BcKind parse_bc_kind(const std::string& token);

}  // namespace dgflux
