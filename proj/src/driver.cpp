#include "dgflux/driver.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "dgflux/initial_conditions.hpp"
#include "dgflux/time_integration.hpp"

namespace dgflux {

namespace {

// boundary-respecting sinusoidal displacement: vanishes on the domain edge,
// so generated boxes stay boxes and periodic spans stay consistent
CurvingFunction sine_curving(const RunConfig& cfg) {
  const Real lx = cfg.x1 - cfg.x0, ly = cfg.y1 - cfg.y0;
  const Real x0 = cfg.x0, y0 = cfg.y0, a = cfg.curveAmplitude;
  return [=](const Vector2& p) {
    const Real s = std::sin(2.0 * M_PI * (p.x() - x0) / lx) *
                   std::sin(2.0 * M_PI * (p.y() - y0) / ly);
    return Vector2(p.x() + a * s, p.y() - 0.8 * a * s);
  };
}

std::string numbered_path(const std::string& prefix, std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04llu.dgfstat", static_cast<unsigned long long>(index));
  return prefix + buf;
}

template <class System>
class Run {
 public:
  Run(const RunConfig& cfg, const System& eq)
      : cfg_(cfg),
        eq_(eq),
        mesh_(build_mesh(cfg)),
        basis_(build_basis(cfg.degree, cfg.nodes)),
        solution_(make_solution(cfg.initial, cfg)) {
    compute_metrics(mesh_, basis_);
    assign_partitions(mesh_, cfg.partitions);
    meshHash_ = mesh_fingerprint(mesh_);

    BoundaryConditions<System> bcs;
    for (const auto& [tag, token] : cfg.boundary) bcs.kinds[tag] = parse_bc_kind(token);
    const auto eval = solution_.eval;
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
    op_ = std::make_unique<SpatialOperator<System>>(mesh_, basis_, eq_, opts, bcs);

    configText_ = serialize_config(canonical_config(cfg));
  }

  RunResult execute() {
    const Index nE = mesh_.n_elements();
    const Index n = basis_.count();
    StateVector u(nE, System::kVars, n);
    Real t = 0.0;

    if (cfg_.restartFrom.empty()) {
      for (Index e = 0; e < nE; ++e)
        for (Index node = 0; node < n * n; ++node) {
          const Vector v = solution_.eval(Vector2(mesh_.elements[e].xNodes.col(node)), 0.0);
          for (int k = 0; k < System::kVars; ++k)
            u.var(e, k)(node % n, node / n) = v[k];
        }
    } else {
      Checkpoint ck = read_checkpoint(cfg_.restartFrom);
      if (ck.meshHash != meshHash_)
        throw IoError("restart mesh fingerprint mismatch: the checkpoint was written "
                      "on a different mesh");
      if (ck.degree != cfg_.degree || ck.nVars != System::kVars)
        throw IoError("restart state shape does not match the config");
      u = std::move(ck.state);
      t = ck.time;
      steps_ = ck.stepCount;
      analysisCount_ = ck.analysisCount;
      outputCount_ = ck.outputCount;
      op_->set_element_kinds(ck.kinds);
    }

    RkIntegrator integ(rk_scheme(cfg_.scheme), nE, System::kVars, n);
    TimestepFactors factors;
    factors.cfl = cfg_.cfl;
    factors.cflViscous = cfg_.cflViscous;
    const IndicatorConfig ic = indicator_config(cfg_);
    const auto rhs = [this](const StateVector& s, Real time, StateVector& d) {
      op_->rhs(s, time, d);
    };

    RunResult result;
    bool kindsCurrent = false;  // true when the pending step's switch already ran
    if (cfg_.restartFrom.empty()) {
      // flag initially troubled elements before the first record, so the
      // t = 0 row already reports the starting FV layout
      if (cfg_.fv) {
        const SwitchReport rep = op_->update_representation(u, t, ic);
        toFv_ += rep.toFv;
        toDg_ += rep.toDg;
        kindsCurrent = true;
      }
      result.records.push_back(make_record(u, t, 0.0));
    }

    Real lastDt = 0.0;
    while (t < cfg_.tEnd) {
      try {
        if (cfg_.fv && !kindsCurrent) {
          const SwitchReport rep = op_->update_representation(u, t, ic);
          toFv_ += rep.toFv;
          toDg_ += rep.toDg;
        }
        kindsCurrent = false;
        Real dt = compute_dt(*op_, u, factors);
        // clip onto the nearest upcoming analysis/output/end time; landings
        // assign t exactly, so restarted runs replay the same sequence
        Real target = cfg_.tEnd;
        if (cfg_.analysisInterval > 0.0)
          target = std::min(target, next_event(cfg_.analysisInterval, analysisCount_));
        if (cfg_.outputInterval > 0.0)
          target = std::min(target, next_event(cfg_.outputInterval, outputCount_));
        bool land = false;
        if (target - t <= dt) {
          dt = target - t;
          land = true;
        }
        integ.step(u, t, dt, rhs);
        t = land ? target : t + dt;
        lastDt = dt;
        ++steps_;
      } catch (const NonPhysicalState& err) {
        throw NonPhysicalState(err.what() + dump_note(u, t));
      } catch (const ConfigError&) {
        throw;
      } catch (const DgError& err) {
        throw DgError(err.what() + dump_note(u, t));
      }

      if (t < cfg_.tEnd) {
        if (cfg_.analysisInterval > 0.0 && t == next_event(cfg_.analysisInterval, analysisCount_)) {
          ++analysisCount_;
          result.records.push_back(make_record(u, t, lastDt));
        }
        if (cfg_.outputInterval > 0.0 && t == next_event(cfg_.outputInterval, outputCount_)) {
          ++outputCount_;
          const std::string path = numbered_path(cfg_.outputPrefix, outputCount_);
          write_checkpoint(make_checkpoint(u, t), path);
          result.checkpointPaths.push_back(path);
        }
      }
    }

    result.records.push_back(make_record(u, t, lastDt));
    if (!cfg_.outputPrefix.empty()) {
      const std::string path = cfg_.outputPrefix + "_final.dgfstat";
      write_checkpoint(make_checkpoint(u, t), path);
      result.checkpointPaths.push_back(path);
    }
    result.time = t;
    result.steps = steps_;
    result.kinds = op_->element_kinds();
    result.state = std::move(u);
    return result;
  }

 private:
  static Real next_event(Real interval, std::uint64_t count) {
    return static_cast<Real>(count + 1) * interval;
  }

  AnalysisRecord make_record(const StateVector& u, Real t, Real dt) {
    AnalysisRecord rec;
    rec.time = t;
    rec.step = steps_;
    rec.dt = dt;
    if (solution_.hasExact) {
      const ErrorNorms norms = error_norms(mesh_, basis_, u, solution_.eval, t);
      rec.l2 = norms.l2;
      rec.linf = norms.linf;
    }
    rec.totals = conservation_totals(mesh_, basis_, u);
    rec.fvFraction =
        static_cast<Real>(op_->fv_count()) / static_cast<Real>(mesh_.n_elements());
    rec.switchedToFv = toFv_;
    rec.switchedToDg = toDg_;
    toFv_ = toDg_ = 0;
    return rec;
  }

  Checkpoint make_checkpoint(const StateVector& u, Real t) const {
    Checkpoint ck;
    ck.time = t;
    ck.degree = cfg_.degree;
    ck.nVars = System::kVars;
    ck.meshHash = meshHash_;
    ck.stepCount = steps_;
    ck.analysisCount = analysisCount_;
    ck.outputCount = outputCount_;
    ck.kinds = op_->element_kinds();
    ck.state = u;
    ck.configText = configText_;
    ck.codeVersion = code_version();
    return ck;
  }

  // diagnostic dump next to the configured outputs; no-op without a prefix
  std::string dump_note(const StateVector& u, Real t) {
    if (cfg_.outputPrefix.empty()) return " (no output prefix, state not dumped)";
    const std::string path = cfg_.outputPrefix + "_crash.dgfstat";
    try {
      write_checkpoint(make_checkpoint(u, t), path);
    } catch (const DgError&) {
      return " (state dump failed)";
    }
    return " (diagnostic state dumped to " + path + ")";
  }

  RunConfig cfg_;
  System eq_;
  Mesh mesh_;
  NodalBasis basis_;
  ProblemSolution solution_;
  std::unique_ptr<SpatialOperator<System>> op_;
  std::uint32_t meshHash_ = 0;
  std::string configText_;
  std::uint64_t steps_ = 0;
  std::uint64_t analysisCount_ = 0;
  std::uint64_t outputCount_ = 0;
  Index toFv_ = 0;
  Index toDg_ = 0;
};

}  // namespace

Mesh build_mesh(const RunConfig& cfg) {
  if (!cfg.meshFile.empty()) return read_mesh(cfg.meshFile);
  GenerateParams p;
  p.nx = cfg.nx;
  p.ny = cfg.ny;
  p.x0 = cfg.x0;
  p.x1 = cfg.x1;
  p.y0 = cfg.y0;
  p.y1 = cfg.y1;
  p.ngeo = cfg.ngeo;
  p.periodicX = cfg.periodicX;
  p.periodicY = cfg.periodicY;
  Mesh mesh = generate_cartesian(p);
  if (cfg.curving == "sine") apply_curving(mesh, sine_curving(cfg));
  return mesh;
}

RunConfig canonical_config(const RunConfig& cfg) {
  RunConfig canonical = cfg;
  canonical.restartFrom.clear();
  canonical.partitions = 1;
  return canonical;
}

RunResult run(const RunConfig& cfg) {
  if (cfg.system == SystemKind::Scalar) {
    ScalarAdvectionDiffusion eq;
    eq.velocity = Vector2(cfg.velocityX, cfg.velocityY);
    eq.diffusivity = cfg.lifting ? cfg.diffusivity : 0.0;
    return Run<ScalarAdvectionDiffusion>(cfg, eq).execute();
  }
  CompressibleFlow eq;
  eq.gamma = cfg.gamma;
  eq.mu = cfg.system == SystemKind::NavierStokes ? cfg.mu : 0.0;
  eq.prandtl = cfg.prandtl;
  return Run<CompressibleFlow>(cfg, eq).execute();
}

}  // namespace dgflux
