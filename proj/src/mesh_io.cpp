#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "dgflux/io_util.hpp"
#include "dgflux/mesh.hpp"

namespace dgflux {

namespace {

constexpr std::array<char, 8> kMagic = {'D', 'G', 'F', 'X', 'M', 'E', 'S', 'H'};
constexpr std::uint32_t kVersion = 1;

std::size_t element_stride(int ngeo) {
  const std::size_t m = static_cast<std::size_t>(ngeo) + 1;
  return 4 * sizeof(std::int64_t) + 2 * m * m * sizeof(double);
}

constexpr std::size_t kSideStride = 2 * sizeof(std::int64_t) +
                                    4 * sizeof(std::int32_t) + 8 +
                                    3 * sizeof(std::int64_t);

std::size_t header_size(const Mesh& mesh) {
  std::size_t names = 0;
  for (const auto& [tag, name] : mesh.bcNames) names += 8 + name.size();
  // magic, version, ngeo, periodic flags, spans, tags, name count, names,
  // element/side counts, element/side byte offsets
  return 8 + 4 + 4 + 4 + 16 + 16 + 4 + names + 8 + 8 + 8 + 8;
}

std::vector<std::uint8_t> serialize_mesh(const Mesh& mesh) {
  ByteWriter w;
  w.bytes(kMagic.data(), kMagic.size());
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(mesh.ngeo));
  w.u8(mesh.periodicX ? 1 : 0);
  w.u8(mesh.periodicY ? 1 : 0);
  w.u8(0);
  w.u8(0);
  w.f64(mesh.spanX);
  w.f64(mesh.spanY);
  for (int t : mesh.boundaryTags) w.i32(t);
  w.u32(static_cast<std::uint32_t>(mesh.bcNames.size()));
  for (const auto& [tag, name] : mesh.bcNames) {
    w.i32(tag);
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
  }
  w.u64(static_cast<std::uint64_t>(mesh.n_elements()));
  w.u64(static_cast<std::uint64_t>(mesh.n_sides()));
  const std::size_t elemOffset = header_size(mesh);
  const std::size_t sideOffset =
      elemOffset + static_cast<std::size_t>(mesh.n_elements()) * element_stride(mesh.ngeo);
  w.u64(elemOffset);
  w.u64(sideOffset);
  if (w.size() != elemOffset) throw IoError("mesh header layout mismatch");

  for (const auto& e : mesh.elements) {
    for (Index sid : e.sideIds) w.i64(sid);
    w.bytes(e.mappingNodes.data(),
            static_cast<std::size_t>(e.mappingNodes.size()) * sizeof(double));
  }
  if (w.size() != sideOffset) throw IoError("mesh element block layout mismatch");

  for (const auto& s : mesh.sides) {
    w.i64(s.master);
    w.i64(s.slave);
    w.i32(s.masterFace);
    w.i32(s.slaveFace);
    w.i32(s.flip);
    w.i32(s.bcTag);
    w.u8(static_cast<std::uint8_t>(s.mortar));
    for (int i = 0; i < 7; ++i) w.u8(0);
    w.i64(s.mortarParent);
    w.i64(s.mortarChildren[0]);
    w.i64(s.mortarChildren[1]);
  }

  std::vector<std::uint8_t> bytes = w.data();
  const std::uint32_t crc = crc32(bytes.data(), bytes.size());
  ByteWriter tail;
  tail.u32(crc);
  bytes.insert(bytes.end(), tail.data().begin(), tail.data().end());
  return bytes;
}

Element parse_element(ByteReader& r, int ngeo) {
  Element e;
  for (auto& sid : e.sideIds) sid = r.i64();
  const Index m = ngeo + 1;
  e.mappingNodes.resize(2, m * m);
  r.bytes(e.mappingNodes.data(),
          static_cast<std::size_t>(e.mappingNodes.size()) * sizeof(double));
  return e;
}

struct Header {
  int ngeo = 1;
  bool periodicX = false, periodicY = false;
  Real spanX = 0, spanY = 0;
  std::array<int, 4> tags{};
  std::map<int, std::string> bcNames;
  std::uint64_t nElems = 0, nSides = 0;
  std::uint64_t elemOffset = 0, sideOffset = 0;
};

Header parse_header(ByteReader& r) {
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw IoError("not a mesh file: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw IoError("unsupported mesh format version");
  Header h;
  h.ngeo = static_cast<int>(r.u32());
  h.periodicX = r.u8() != 0;
  h.periodicY = r.u8() != 0;
  r.skip(2);
  h.spanX = r.f64();
  h.spanY = r.f64();
  for (auto& t : h.tags) t = r.i32();
  const std::uint32_t nNames = r.u32();
  for (std::uint32_t i = 0; i < nNames; ++i) {
    const int tag = r.i32();
    const std::uint32_t len = r.u32();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    h.bcNames[tag] = std::move(name);
  }
  h.nElems = r.u64();
  h.nSides = r.u64();
  h.elemOffset = r.u64();
  h.sideOffset = r.u64();
  return h;
}

}  // namespace

void write_mesh(const Mesh& mesh, const std::string& path) {
  write_file(path, serialize_mesh(mesh));
}

std::uint32_t mesh_fingerprint(const Mesh& mesh) {
  const auto bytes = serialize_mesh(mesh);
  return crc32(bytes.data(), bytes.size());
}

Mesh read_mesh(const std::string& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < kMagic.size() + 8) throw IoError("mesh file too short");
  std::uint32_t trailer;
  std::memcpy(&trailer, bytes.data() + bytes.size() - 4, 4);
  const std::uint32_t computed = crc32(bytes.data(), bytes.size() - 4);
  if (trailer != computed) throw IoError("mesh file checksum mismatch");

  ByteReader r(bytes.data(), bytes.size() - 4);
  const Header h = parse_header(r);
  if (r.pos() != h.elemOffset) throw IoError("mesh header layout mismatch");

  Mesh mesh;
  mesh.ngeo = h.ngeo;
  mesh.periodicX = h.periodicX;
  mesh.periodicY = h.periodicY;
  mesh.spanX = h.spanX;
  mesh.spanY = h.spanY;
  mesh.boundaryTags = h.tags;
  mesh.bcNames = h.bcNames;
  mesh.elements.resize(h.nElems);
  for (auto& e : mesh.elements) e = parse_element(r, h.ngeo);
  if (r.pos() != h.sideOffset) throw IoError("mesh element block layout mismatch");
  mesh.sides.resize(h.nSides);
  for (auto& s : mesh.sides) {
    s.master = r.i64();
    s.slave = r.i64();
    s.masterFace = r.i32();
    s.slaveFace = r.i32();
    s.flip = r.i32();
    s.bcTag = r.i32();
    s.mortar = static_cast<MortarRole>(r.u8());
    r.skip(7);
    s.mortarParent = r.i64();
    s.mortarChildren[0] = r.i64();
    s.mortarChildren[1] = r.i64();
  }
  if (r.remaining() != 0) throw IoError("trailing bytes in mesh file");
  assign_partitions(mesh, 1);
  return mesh;
}

std::vector<Element> read_element_range(const std::string& path, Index first,
                                        Index count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  // Enough for the fixed prefix plus a generous boundary-name table.
  std::vector<std::uint8_t> head(1 << 16);
  in.read(reinterpret_cast<char*>(head.data()),
          static_cast<std::streamsize>(head.size()));
  const auto got = static_cast<std::size_t>(in.gcount());
  ByteReader r(head.data(), got);
  const Header h = parse_header(r);

  if (first < 0 || count < 0 ||
      static_cast<std::uint64_t>(first) + static_cast<std::uint64_t>(count) > h.nElems)
    throw IoError("element range out of bounds");

  const std::size_t stride = element_stride(h.ngeo);
  std::vector<std::uint8_t> block(stride * static_cast<std::size_t>(count));
  in.clear();
  in.seekg(static_cast<std::streamoff>(h.elemOffset + stride * static_cast<std::size_t>(first)));
  in.read(reinterpret_cast<char*>(block.data()),
          static_cast<std::streamsize>(block.size()));
  if (static_cast<std::size_t>(in.gcount()) != block.size())
    throw IoError("short read of element range");

  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(count));
  ByteReader br(block.data(), block.size());
  for (Index i = 0; i < count; ++i) out.push_back(parse_element(br, h.ngeo));
  return out;
}

}  // namespace dgflux
