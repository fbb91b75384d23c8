#pragma once

#include <string>
#include <vector>

#include "dgflux/analysis.hpp"
#include "dgflux/checkpoint.hpp"
#include "dgflux/config.hpp"

namespace dgflux {

struct RunResult {
  Real time = 0.0;
  std::uint64_t steps = 0;
  StateVector state;
  std::vector<ElementKind> kinds;
  std::vector<AnalysisRecord> records;
  std::vector<std::string> checkpointPaths;  // written files, final one last
};

// Mesh per the config: read from `mesh` when set, generated and optionally
// curved otherwise. Metrics are left to the caller, which knows the basis.
Mesh build_mesh(const RunConfig& cfg);

// The config a checkpoint embeds: the run stripped of execution details
// (partition count, restart source) that do not affect the produced state.
RunConfig canonical_config(const RunConfig& cfg);

// Full time loop: initialization or restart, step-size control with exact
// landings on analysis/output/end times, representation switching, interval
// analysis, checkpoint writing. Deterministic for a fixed config; the
// partition count never changes the produced bytes.
RunResult run(const RunConfig& cfg);

}  // namespace dgflux
