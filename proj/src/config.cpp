#include "dgflux/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "dgflux/initial_conditions.hpp"
#include "dgflux/time_integration.hpp"

namespace dgflux {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream msg;
  msg << "config line " << line << ": " << what;
  throw ConfigError(msg.str());
}

Real parse_real(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const Real r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail(line, "'" + key + "' expects a number, got '" + v + "'");
  }
}

long parse_int(int line, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long r = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail(line, "'" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(int line, const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  fail(line, "'" + key + "' expects true/false, got '" + v + "'");
}

// value tokens, one table per enum so parse and serialize cannot drift
template <class E>
struct Token {
  E value;
  const char* name;
};

constexpr Token<SystemKind> kSystems[] = {{SystemKind::Scalar, "scalar"},
                                          {SystemKind::Euler, "euler"},
                                          {SystemKind::NavierStokes, "navierstokes"}};
constexpr Token<NodeFamily> kNodes[] = {{NodeFamily::LegendreGaussLobatto, "LGL"},
                                        {NodeFamily::LegendreGauss, "LG"}};
constexpr Token<Form> kForms[] = {{Form::Weak, "weak"},
                                  {Form::Strong, "strong"},
                                  {Form::Split, "split"}};
constexpr Token<RiemannSolver> kRiemann[] = {{RiemannSolver::Rusanov, "rusanov"},
                                             {RiemannSolver::Hll, "hll"},
                                             {RiemannSolver::Roe, "roe"},
                                             {RiemannSolver::Central, "central"}};
constexpr Token<TwoPointVariant> kVolumeFlux[] = {
    {TwoPointVariant::StandardMean, "standard"},
    {TwoPointVariant::PirozzoliKEP, "pirozzoli"},
    {TwoPointVariant::ChandrashekarEC, "chandrashekar"}};
constexpr Token<IndicatorKind> kIndicators[] = {{IndicatorKind::PerssonModal, "persson"},
                                                {IndicatorKind::JamesonPressure, "jameson"}};
constexpr Token<SlopeLimiter> kLimiters[] = {{SlopeLimiter::Minmod, "minmod"},
                                             {SlopeLimiter::Central, "central"},
                                             {SlopeLimiter::Zero, "zero"}};

template <class E, std::size_t M>
E parse_enum(int line, const std::string& key, const std::string& v,
             const Token<E> (&table)[M]) {
  for (const auto& t : table)
    if (v == t.name) return t.value;
  std::string allowed;
  for (const auto& t : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += t.name;
  }
  fail(line, "'" + key + "' must be one of {" + allowed + "}, got '" + v + "'");
}

template <class E, std::size_t M>
const char* enum_name(E value, const Token<E> (&table)[M]) {
  for (const auto& t : table)
    if (t.value == value) return t.name;
  return "?";
}

// shortest decimal that reads back to the same double
std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::stod(probe) == v) return probe;
  }
  return buf;
}

void validate(const RunConfig& c) {
  if (c.degree < 1) throw ConfigError("polynomial degree must be at least 1");
  if (c.form == Form::Split && c.nodes != NodeFamily::LegendreGaussLobatto)
    throw ConfigError(
        "the split form needs the summation-by-parts property and is only "
        "available on Gauss-Lobatto nodes; set nodes = LGL");
  const bool viscous = c.system == SystemKind::Scalar ? c.diffusivity > 0.0 : c.mu > 0.0;
  if (viscous && !c.lifting)
    throw ConfigError("viscous terms need the gradient lifting; set lifting = on");
  if (c.system == SystemKind::NavierStokes && c.mu <= 0.0)
    throw ConfigError("the navierstokes system expects mu > 0; use euler otherwise");
  if (c.system == SystemKind::Euler && c.mu > 0.0)
    throw ConfigError("the euler system is inviscid; set system = navierstokes for mu > 0");
  if (c.meshFile.empty()) {
    if (c.nx < 1 || c.ny < 1) throw ConfigError("mesh generation needs nx, ny >= 1");
    if (!(c.x1 > c.x0) || !(c.y1 > c.y0))
      throw ConfigError("mesh generation needs x1 > x0 and y1 > y0");
    if (c.ngeo < 1) throw ConfigError("mesh generation needs ngeo >= 1");
  }
  if (c.curving != "none" && c.curving != "sine")
    throw ConfigError("unknown curving '" + c.curving + "'; use none or sine");
  if (c.cfl <= 0.0 || c.cflViscous <= 0.0) throw ConfigError("CFL factors must be positive");
  if (c.tEnd < 0.0) throw ConfigError("t_end must be non-negative");
  if (c.analysisInterval < 0.0 || c.outputInterval < 0.0)
    throw ConfigError("intervals must be non-negative");
  if (c.outputInterval > 0.0 && c.outputPrefix.empty())
    throw ConfigError("output_interval needs an output_prefix to name the files");
  if (c.partitions < 1) throw ConfigError("partitions must be at least 1");
  for (const auto& [tag, kind] : c.boundary) parse_bc_kind(kind);
  rk_scheme(c.scheme);  // rejects unregistered scheme names
  if (!is_registered_solution(c.initial)) {
    std::string names;
    for (const auto& n : solution_names()) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    throw ConfigError("unknown initial solution '" + c.initial + "'; registered: " + names);
  }
}

}  // namespace

BcKind parse_bc_kind(const std::string& token) {
  if (token == "dirichlet") return BcKind::Dirichlet;
  if (token == "slipwall") return BcKind::SlipWall;
  if (token == "noslip") return BcKind::NoSlipAdiabatic;
  throw ConfigError("unknown boundary kind '" + token +
                    "'; use dirichlet, slipwall, or noslip");
}

IndicatorConfig indicator_config(const RunConfig& cfg) {
  IndicatorConfig ic;
  ic.kind = cfg.indicator;
  ic.upperThreshold = cfg.indicatorUpper;
  ic.lowerThreshold = cfg.indicatorLower;
  return ic;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineNo, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineNo, "missing key before '='");
    if (val.empty()) fail(lineNo, "missing value for '" + key + "'");

    if (key == "mesh") c.meshFile = val;
    else if (key == "nx") c.nx = parse_int(lineNo, key, val);
    else if (key == "ny") c.ny = parse_int(lineNo, key, val);
    else if (key == "x0") c.x0 = parse_real(lineNo, key, val);
    else if (key == "x1") c.x1 = parse_real(lineNo, key, val);
    else if (key == "y0") c.y0 = parse_real(lineNo, key, val);
    else if (key == "y1") c.y1 = parse_real(lineNo, key, val);
    else if (key == "ngeo") c.ngeo = static_cast<int>(parse_int(lineNo, key, val));
    else if (key == "periodic_x") c.periodicX = parse_bool(lineNo, key, val);
    else if (key == "periodic_y") c.periodicY = parse_bool(lineNo, key, val);
    else if (key == "curving") c.curving = val;
    else if (key == "curve_amplitude") c.curveAmplitude = parse_real(lineNo, key, val);
    else if (key == "system") c.system = parse_enum(lineNo, key, val, kSystems);
    else if (key == "velocity_x") c.velocityX = parse_real(lineNo, key, val);
    else if (key == "velocity_y") c.velocityY = parse_real(lineNo, key, val);
    else if (key == "diffusivity") c.diffusivity = parse_real(lineNo, key, val);
    else if (key == "gamma") c.gamma = parse_real(lineNo, key, val);
    else if (key == "mu") c.mu = parse_real(lineNo, key, val);
    else if (key == "prandtl") c.prandtl = parse_real(lineNo, key, val);
    else if (key == "N") c.degree = static_cast<int>(parse_int(lineNo, key, val));
    else if (key == "nodes") c.nodes = parse_enum(lineNo, key, val, kNodes);
    else if (key == "form") c.form = parse_enum(lineNo, key, val, kForms);
    else if (key == "riemann") c.riemann = parse_enum(lineNo, key, val, kRiemann);
    else if (key == "volume_flux") c.volumeFlux = parse_enum(lineNo, key, val, kVolumeFlux);
    else if (key == "lifting") c.lifting = parse_bool(lineNo, key, val);
    else if (key == "fv") c.fv = parse_bool(lineNo, key, val);
    else if (key == "indicator") c.indicator = parse_enum(lineNo, key, val, kIndicators);
    else if (key == "indicator_upper") c.indicatorUpper = parse_real(lineNo, key, val);
    else if (key == "indicator_lower") c.indicatorLower = parse_real(lineNo, key, val);
    else if (key == "limiter") c.limiter = parse_enum(lineNo, key, val, kLimiters);
    else if (key == "scheme") c.scheme = val;
    else if (key == "cfl") c.cfl = parse_real(lineNo, key, val);
    else if (key == "cfl_viscous") c.cflViscous = parse_real(lineNo, key, val);
    else if (key == "t_end") c.tEnd = parse_real(lineNo, key, val);
    else if (key == "analysis_interval") c.analysisInterval = parse_real(lineNo, key, val);
    else if (key == "output_interval") c.outputInterval = parse_real(lineNo, key, val);
    else if (key == "output_prefix") c.outputPrefix = val;
    else if (key == "initial") c.initial = val;
    else if (key == "restart") c.restartFrom = val;
    else if (key == "partitions") c.partitions = static_cast<int>(parse_int(lineNo, key, val));
    else if (key.size() > 2 && key.compare(0, 2, "bc") == 0 &&
             std::all_of(key.begin() + 2, key.end(),
                         [](unsigned char ch) { return std::isdigit(ch); }))
      c.boundary[static_cast<int>(parse_int(lineNo, key, key.substr(2)))] = val;
    else
      fail(lineNo, "unknown key '" + key + "'");
  }
  validate(c);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& v) { out << key << " = " << v << "\n"; };
  auto kr = [&kv](const char* key, Real v) { kv(key, format_real(v)); };
  auto ki = [&kv](const char* key, long v) { kv(key, std::to_string(v)); };
  auto kb = [&kv](const char* key, bool v) { kv(key, v ? "true" : "false"); };

  if (!c.meshFile.empty()) kv("mesh", c.meshFile);
  ki("nx", c.nx);
  ki("ny", c.ny);
  kr("x0", c.x0);
  kr("x1", c.x1);
  kr("y0", c.y0);
  kr("y1", c.y1);
  ki("ngeo", c.ngeo);
  kb("periodic_x", c.periodicX);
  kb("periodic_y", c.periodicY);
  kv("curving", c.curving);
  kr("curve_amplitude", c.curveAmplitude);
  kv("system", enum_name(c.system, kSystems));
  kr("velocity_x", c.velocityX);
  kr("velocity_y", c.velocityY);
  kr("diffusivity", c.diffusivity);
  kr("gamma", c.gamma);
  kr("mu", c.mu);
  kr("prandtl", c.prandtl);
  ki("N", c.degree);
  kv("nodes", enum_name(c.nodes, kNodes));
  kv("form", enum_name(c.form, kForms));
  kv("riemann", enum_name(c.riemann, kRiemann));
  kv("volume_flux", enum_name(c.volumeFlux, kVolumeFlux));
  kb("lifting", c.lifting);
  kb("fv", c.fv);
  kv("indicator", enum_name(c.indicator, kIndicators));
  kr("indicator_upper", c.indicatorUpper);
  kr("indicator_lower", c.indicatorLower);
  kv("limiter", enum_name(c.limiter, kLimiters));
  kv("scheme", c.scheme);
  kr("cfl", c.cfl);
  kr("cfl_viscous", c.cflViscous);
  kr("t_end", c.tEnd);
  kr("analysis_interval", c.analysisInterval);
  kr("output_interval", c.outputInterval);
  if (!c.outputPrefix.empty()) kv("output_prefix", c.outputPrefix);
  kv("initial", c.initial);
  if (!c.restartFrom.empty()) kv("restart", c.restartFrom);
  ki("partitions", c.partitions);
  for (const auto& [tag, kind] : c.boundary)
    kv(("bc" + std::to_string(tag)).c_str(), kind);
  return out.str();
}

}  // namespace dgflux
