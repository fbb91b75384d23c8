#include "dgflux/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "dgflux/io_util.hpp"

namespace dgflux {

namespace {

constexpr std::array<char, 8> kMagic = {'D', 'G', 'F', 'X', 'S', 'T', 'A', 'T'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderSize = 64;

struct Header {
  std::uint32_t version = 0;
  std::uint32_t meshHash = 0;
  Real time = 0.0;
  std::uint32_t degree = 0;
  std::uint32_t nVars = 0;
  std::uint64_t nElements = 0;
  std::uint64_t stepCount = 0;
  std::uint64_t analysisCount = 0;
  std::uint64_t outputCount = 0;

  std::size_t element_stride() const {
    const std::size_t n = degree + 1;
    return nVars * n * n * sizeof(Real);
  }
  std::size_t payload_offset() const { return kHeaderSize + nElements; }
};

Header parse_header(ByteReader& r) {
  std::array<char, 8> magic;
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw IoError("not a solver state file (bad magic)");
  Header h;
  h.version = r.u32();
  if (h.version != kFormatVersion)
    throw IoError("unsupported state file version " + std::to_string(h.version));
  h.meshHash = r.u32();
  h.time = r.f64();
  h.degree = r.u32();
  h.nVars = r.u32();
  h.nElements = r.u64();
  h.stepCount = r.u64();
  h.analysisCount = r.u64();
  h.outputCount = r.u64();
  return h;
}

}  // namespace

std::string code_version() {
  return "dgflux 1.0.0 (" __VERSION__ ")";
}

void write_checkpoint(const Checkpoint& c, const std::string& path) {
  const Index nE = c.state.n_elements();
  if (static_cast<Index>(c.kinds.size()) != nE)
    throw IoError("checkpoint kinds do not match the state");
  if (c.state.n_vars() != c.nVars || c.state.nodes_per_dir() != c.degree + 1)
    throw IoError("checkpoint shape fields do not match the state");

  ByteWriter w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kFormatVersion);
  w.u32(c.meshHash);
  w.f64(c.time);
  w.u32(static_cast<std::uint32_t>(c.degree));
  w.u32(static_cast<std::uint32_t>(c.nVars));
  w.u64(static_cast<std::uint64_t>(nE));
  w.u64(c.stepCount);
  w.u64(c.analysisCount);
  w.u64(c.outputCount);
  for (ElementKind k : c.kinds) w.u8(static_cast<std::uint8_t>(k));
  w.bytes(c.state.flat().data(), c.state.size() * sizeof(Real));
  w.u64(c.configText.size());
  w.bytes(c.configText.data(), c.configText.size());
  w.u64(c.codeVersion.size());
  w.bytes(c.codeVersion.data(), c.codeVersion.size());
  w.u32(crc32(w.data().data(), w.size()));
  write_file(path, w.data());
}

Checkpoint read_checkpoint(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < kHeaderSize + sizeof(std::uint32_t))
    throw IoError("truncated state file: " + path);
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, sizeof stored);
  if (crc32(bytes.data(), bytes.size() - 4) != stored)
    throw IoError("state file checksum mismatch: " + path);

  ByteReader r(bytes.data(), bytes.size() - 4);
  const Header h = parse_header(r);
  Checkpoint c;
  c.time = h.time;
  c.degree = static_cast<int>(h.degree);
  c.nVars = static_cast<int>(h.nVars);
  c.meshHash = h.meshHash;
  c.stepCount = h.stepCount;
  c.analysisCount = h.analysisCount;
  c.outputCount = h.outputCount;
  c.kinds.resize(h.nElements);
  for (auto& k : c.kinds) k = static_cast<ElementKind>(r.u8());
  c.state = StateVector(static_cast<Index>(h.nElements), c.nVars,
                        static_cast<Index>(h.degree + 1));
  r.bytes(c.state.flat().data(), c.state.size() * sizeof(Real));
  const std::uint64_t configLen = r.u64();
  c.configText.resize(configLen);
  r.bytes(c.configText.data(), configLen);
  const std::uint64_t versionLen = r.u64();
  c.codeVersion.resize(versionLen);
  r.bytes(c.codeVersion.data(), versionLen);
  if (r.remaining() != 0) throw IoError("trailing bytes in state file: " + path);
  return c;
}

std::vector<Real> read_checkpoint_range(const std::string& path, Index first, Index count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::array<std::uint8_t, kHeaderSize> head;
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (!in) throw IoError("truncated state file: " + path);
  ByteReader r(head.data(), head.size());
  const Header h = parse_header(r);
  if (first < 0 || count < 0 || static_cast<std::uint64_t>(first + count) > h.nElements)
    throw IoError("element range outside the state file");

  const std::size_t stride = h.element_stride();
  std::vector<Real> out(count * static_cast<Index>(stride / sizeof(Real)));
  in.seekg(static_cast<std::streamoff>(h.payload_offset() + first * stride));
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(count * stride));
  if (!in) throw IoError("truncated state file: " + path);
  return out;
}

std::string read_checkpoint_config(const std::string& path) {
  const Checkpoint c = read_checkpoint(path);
  return c.configText;
}

}  // namespace dgflux
