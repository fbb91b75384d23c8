#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgflux/dg_operator.hpp"
#include "dgflux/fields.hpp"

namespace dgflux {

// Solver state file ("DGFXSTAT"): a fixed 64-byte header, one kind byte per
// element, the nodal payload in space-filling-curve element order, then the
// user block (config text and code version) and a trailing CRC32. Everything
// a restart needs travels inside, so the original parameter file is not.
struct Checkpoint {
  Real time = 0.0;
  int degree = 0;
  int nVars = 0;
  std::uint32_t meshHash = 0;
  // event counters; restarts resume them so the clipped-step sequence after
  // the restart point replays exactly
  std::uint64_t stepCount = 0;
  std::uint64_t analysisCount = 0;
  std::uint64_t outputCount = 0;
  std::vector<ElementKind> kinds;
  StateVector state;
  std::string configText;
  std::string codeVersion;
};

void write_checkpoint(const Checkpoint& c, const std::string& path);

// Full read with CRC and version verification; any defect throws IoError
// before a partial Checkpoint can escape.
Checkpoint read_checkpoint(const std::string& path);

// Nodal payload of elements [first, first + count) straight from the file
// offset; validates the header but not the trailer.
std::vector<Real> read_checkpoint_range(const std::string& path, Index first, Index count);

// Embedded config text, byte-identical to what was written.
std::string read_checkpoint_config(const std::string& path);

// Semantic version plus build identifier, embedded in every checkpoint.
std::string code_version();

}  // namespace dgflux
