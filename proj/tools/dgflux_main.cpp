#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dgflux/driver.hpp"
#include "dgflux/export.hpp"
#include "dgflux/initial_conditions.hpp"
#include "dgflux/time_integration.hpp"

namespace {

using namespace dgflux;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void print_records(const std::vector<AnalysisRecord>& records) {
  for (const AnalysisRecord& r : records) {
    std::printf("t=%-12.6g step=%-8llu dt=%-12.6g fv=%5.1f%%",
                r.time, static_cast<unsigned long long>(r.step), r.dt,
                100.0 * r.fvFraction);
    if (r.l2.size() > 0) std::printf(" L2[0]=%-12.6g Linf[0]=%-12.6g", r.l2[0], r.linf[0]);
    if (r.totals.size() > 0) std::printf(" total[0]=%.12g", r.totals[0]);
    std::printf("\n");
  }
}

int cmd_run(const std::string& configPath) {
  const RunConfig cfg = parse_config(slurp(configPath));
  const RunResult result = run(cfg);
  print_records(result.records);
  std::printf("finished at t=%.12g after %llu steps\n", result.time,
              static_cast<unsigned long long>(result.steps));
  for (const auto& path : result.checkpointPaths) std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_mesh(const std::string& configPath) {
  const RunConfig cfg = parse_config(slurp(configPath));
  if (cfg.outputPrefix.empty())
    throw ConfigError("the mesh command needs an output_prefix for the file name");
  Mesh mesh = build_mesh(cfg);
  const std::string path = cfg.outputPrefix + ".dgfmesh";
  write_mesh(mesh, path);
  std::printf("wrote %s (%lld elements, %lld sides)\n", path.c_str(),
              static_cast<long long>(mesh.n_elements()),
              static_cast<long long>(mesh.n_sides()));
  return 0;
}

// rebuild the operator a checkpoint was produced with, restore its state
template <class System>
void export_checkpoint(const RunConfig& cfg, const System& eq, const Checkpoint& ck,
                       int nVis, const std::string& path,
                       const std::vector<std::string>& derived) {
  Mesh mesh = build_mesh(cfg);
  const NodalBasis basis = build_basis(cfg.degree, cfg.nodes);
  compute_metrics(mesh, basis);
  if (mesh_fingerprint(mesh) != ck.meshHash)
    throw IoError("checkpoint mesh fingerprint does not match its embedded config");

  BoundaryConditions<System> bcs;
  for (const auto& [tag, token] : cfg.boundary) bcs.kinds[tag] = parse_bc_kind(token);
  const ProblemSolution solution = make_solution(cfg.initial, cfg);
  const auto eval = solution.eval;
  bcs.exact = [eval](const Vector2& x, Real t) {
    const Vector v = eval(x, t);
    typename System::State s;
    for (int k = 0; k < System::kVars; ++k) s[k] = v[k];
    return s;
  };
  DgOptions opts;
  opts.form = cfg.form;
  opts.solver = cfg.riemann;
  opts.twoPoint = cfg.volumeFlux;
  opts.limiter = cfg.limiter;
  SpatialOperator<System> op(mesh, basis, eq, opts, bcs);
  op.set_element_kinds(ck.kinds);
  export_visualization(op, ck.state, ck.time, nVis, path, derived);
}

int cmd_export(const std::string& ckPath, int nVis, const std::string& varsCsv,
               std::string outPath) {
  const Checkpoint ck = read_checkpoint(ckPath);
  const RunConfig cfg = parse_config(ck.configText);
  if (outPath.empty()) outPath = ckPath + ".vtk";
  std::vector<std::string> derived;
  std::stringstream vars(varsCsv);
  std::string item;
  while (std::getline(vars, item, ','))
    if (!item.empty()) derived.push_back(item);

  if (cfg.system == SystemKind::Scalar) {
    ScalarAdvectionDiffusion eq;
    eq.velocity = Vector2(cfg.velocityX, cfg.velocityY);
    eq.diffusivity = cfg.diffusivity;
    export_checkpoint(cfg, eq, ck, nVis, outPath, derived);
  } else {
    CompressibleFlow eq;
    eq.gamma = cfg.gamma;
    eq.mu = cfg.system == SystemKind::NavierStokes ? cfg.mu : 0.0;
    eq.prandtl = cfg.prandtl;
    export_checkpoint(cfg, eq, ck, nVis, outPath, derived);
  }
  std::printf("wrote %s\n", outPath.c_str());
  return 0;
}

int cmd_config_extract(const std::string& ckPath) {
  std::cout << read_checkpoint_config(ckPath);
  return 0;
}

int cmd_calibrate(const std::string& configPath) {
  const RunConfig cfg = parse_config(slurp(configPath));
  const Real factor = calibrate_cfl(cfg.degree, cfg.nodes, rk_scheme(cfg.scheme));
  std::printf("largest stable CFL factor for N=%d, %s nodes, %s: %.4f\n", cfg.degree,
              cfg.nodes == NodeFamily::LegendreGauss ? "LG" : "LGL", cfg.scheme.c_str(),
              factor);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-order discontinuous Galerkin solver with subcell shock capturing"};
  app.require_subcommand(1);

  std::string configPath, ckPath, outPath, vars;
  int nVis = 4;

  auto* runCmd = app.add_subcommand("run", "run a simulation from a config file");
  runCmd->add_option("config", configPath, "config file")->required();

  auto* meshCmd = app.add_subcommand("mesh", "generate a mesh file from a config");
  meshCmd->add_option("config", configPath, "config file")->required();

  auto* exportCmd = app.add_subcommand("export", "export a checkpoint for visualization");
  exportCmd->add_option("checkpoint", ckPath, "checkpoint file")->required();
  exportCmd->add_option("--nvis", nVis, "samples per element direction");
  exportCmd->add_option("--vars", vars, "derived quantities, comma separated (p,s,omega)");
  exportCmd->add_option("--out", outPath, "output path (default: <checkpoint>.vtk)");

  auto* extractCmd = app.add_subcommand("config-extract", "print the embedded config");
  extractCmd->add_option("checkpoint", ckPath, "checkpoint file")->required();

  auto* calCmd = app.add_subcommand("calibrate-cfl", "measure the stable CFL factor");
  calCmd->add_option("config", configPath, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (runCmd->parsed()) return cmd_run(configPath);
    if (meshCmd->parsed()) return cmd_mesh(configPath);
    if (exportCmd->parsed()) return cmd_export(ckPath, nVis, vars, outPath);
    if (extractCmd->parsed()) return cmd_config_extract(ckPath);
    if (calCmd->parsed()) return cmd_calibrate(configPath);
  } catch (const DgError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
