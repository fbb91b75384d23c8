#include "dgflux/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <utility>

#include "dgflux/tensor.hpp"

namespace dgflux {

namespace {

std::uint64_t spread_bits(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x << 2)) & 0x3333333333333333ull;
  x = (x | (x << 1)) & 0x5555555555555555ull;
  return x;
}

std::uint32_t compact_bits(std::uint64_t x) {
  x &= 0x5555555555555555ull;
  x = (x | (x >> 1)) & 0x3333333333333333ull;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFull;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFull;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(x);
}

int geometry_order(const Element& e) {
  const auto cols = e.mappingNodes.cols();
  const int m = static_cast<int>(std::lround(std::sqrt(double(cols))));
  return m - 1;
}

Matrix coord_grid(const Element& e, int c, int g) {
  Matrix grid(g + 1, g + 1);
  for (Index q = 0; q < e.mappingNodes.cols(); ++q)
    grid(q % (g + 1), q / (g + 1)) = e.mappingNodes(c, q);
  return grid;
}

// Traversal endpoints of a local face, in ascending-coordinate order.
std::pair<Vector2, Vector2> face_endpoints(const Element& e, int face) {
  switch (face) {
    case 0: return {e.corner(0), e.corner(2)};
    case 1: return {e.corner(1), e.corner(3)};
    case 2: return {e.corner(0), e.corner(1)};
    default: return {e.corner(2), e.corner(3)};
  }
}

int mortar_rank(MortarRole r) {
  switch (r) {
    case MortarRole::LowerChild: return 1;
    case MortarRole::UpperChild: return 2;
    default: return 0;
  }
}

// Sorts sides into the canonical deterministic order and remaps the
// mortar cross references accordingly.
void canonicalize_sides(Mesh& mesh) {
  const Index n = mesh.n_sides();
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](Index a, Index b) {
    const Side& sa = mesh.sides[a];
    const Side& sb = mesh.sides[b];
    const auto ka = std::make_tuple(sa.master, sa.masterFace, mortar_rank(sa.mortar));
    const auto kb = std::make_tuple(sb.master, sb.masterFace, mortar_rank(sb.mortar));
    return ka < kb;
  });
  std::vector<Index> inverse(n);
  for (Index i = 0; i < n; ++i) inverse[perm[i]] = i;
  std::vector<Side> sorted(n);
  for (Index i = 0; i < n; ++i) {
    sorted[i] = mesh.sides[perm[i]];
    Side& s = sorted[i];
    if (s.mortarParent >= 0) s.mortarParent = inverse[s.mortarParent];
    for (auto& c : s.mortarChildren)
      if (c >= 0) c = inverse[c];
  }
  mesh.sides = std::move(sorted);

  for (auto& e : mesh.elements) e.sideIds = {-1, -1, -1, -1};
  for (Index sid = 0; sid < n; ++sid) {
    const Side& s = mesh.sides[sid];
    if (!s.is_mortar_child()) mesh.elements[s.master].sideIds[s.masterFace] = sid;
    if (s.slave >= 0) mesh.elements[s.slave].sideIds[s.slaveFace] = sid;
  }
}

}  // namespace

Vector2 Element::corner(int c) const {
  const int g = geometry_order(*this);
  const Index m = g + 1;
  static constexpr int kAtMax[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const Index i = kAtMax[c][0] ? g : 0;
  const Index j = kAtMax[c][1] ? g : 0;
  return mappingNodes.col(j * m + i);
}

Vector2 Element::centroid() const {
  return 0.25 * (corner(0) + corner(1) + corner(2) + corner(3));
}

int Partitioning::owner(Index elem) const {
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), elem);
  return static_cast<int>(it - offsets.begin()) - 1;
}

bool RefineRegion::contains(const Vector2& p) const {
  return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
}

std::uint64_t morton_encode(std::uint32_t i, std::uint32_t j) {
  return spread_bits(i) | (spread_bits(j) << 1);
}

std::pair<std::uint32_t, std::uint32_t> morton_decode(std::uint64_t code) {
  return {compact_bits(code), compact_bits(code >> 1)};
}

Vector cgl_nodes(int n) {
  if (n < 1) throw DgError("geometry order must be at least 1");
  Vector x(n + 1);
  // mirrored fill keeps the set exactly symmetric in floating point
  for (int i = 0; i <= n / 2; ++i) {
    const Real v = -std::cos(M_PI * double(i) / double(n));
    x[i] = v;
    x[n - i] = -v;
  }
  x[0] = -1.0;
  x[n] = 1.0;
  if (n % 2 == 0) x[n / 2] = 0.0;
  return x;
}

Matrix map_eval(const Element& elem, int ngeo, const Vector& xi,
                const Vector& eta) {
  const Vector cgl = cgl_nodes(ngeo);
  const Matrix pXi = build_interpolation_matrix(cgl, xi);
  const Matrix pEta = build_interpolation_matrix(cgl, eta);
  Matrix out(2, xi.size() * eta.size());
  for (int c = 0; c < 2; ++c) {
    const Matrix grid = coord_grid(elem, c, ngeo);
    const Matrix vals = pXi * grid * pEta.transpose();
    out.row(c) = Eigen::Map<const Vector>(vals.data(), vals.size()).transpose();
  }
  return out;
}

Mesh generate_cartesian(const GenerateParams& p) {
  if (p.nx < 1 || p.ny < 1) throw DgError("mesh must have at least one cell per direction");
  if (!(p.x1 > p.x0) || !(p.y1 > p.y0)) throw DgError("degenerate mesh extents");
  if (p.ngeo < 1 || p.ngeo > kMaxDegree) throw DgError("geometry order out of range");

  Mesh mesh;
  mesh.ngeo = p.ngeo;
  mesh.periodicX = p.periodicX;
  mesh.periodicY = p.periodicY;
  mesh.spanX = p.x1 - p.x0;
  mesh.spanY = p.y1 - p.y0;
  mesh.boundaryTags = p.bcTags;
  if (!p.periodicX) {
    mesh.bcNames[p.bcTags[0]] = "left";
    mesh.bcNames[p.bcTags[1]] = "right";
  }
  if (!p.periodicY) {
    mesh.bcNames[p.bcTags[2]] = "bottom";
    mesh.bcNames[p.bcTags[3]] = "top";
  }

  struct Cell {
    std::uint64_t code;
    Index i, j;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(p.nx * p.ny));
  for (Index j = 0; j < p.ny; ++j)
    for (Index i = 0; i < p.nx; ++i)
      cells.push_back({morton_encode(static_cast<std::uint32_t>(i),
                                     static_cast<std::uint32_t>(j)),
                       i, j});
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.code < b.code; });

  const Real dx = (p.x1 - p.x0) / Real(p.nx);
  const Real dy = (p.y1 - p.y0) / Real(p.ny);
  const Vector cgl = cgl_nodes(p.ngeo);
  const Index m = p.ngeo + 1;

  mesh.elements.resize(cells.size());
  for (std::size_t e = 0; e < cells.size(); ++e) {
    Element& elem = mesh.elements[e];
    elem.mappingNodes.resize(2, m * m);
    for (Index jq = 0; jq < m; ++jq)
      for (Index iq = 0; iq < m; ++iq) {
        const Index q = jq * m + iq;
        elem.mappingNodes(0, q) = p.x0 + dx * (Real(cells[e].i) + 0.5 * (cgl[iq] + 1.0));
        elem.mappingNodes(1, q) = p.y0 + dy * (Real(cells[e].j) + 0.5 * (cgl[jq] + 1.0));
      }
  }

  connect_sides(mesh);
  return mesh;
}

void connect_sides(Mesh& mesh) {
  using Key = std::pair<std::int64_t, std::int64_t>;

  Real loX = 1e300, hiX = -1e300, loY = 1e300, hiY = -1e300;
  for (const auto& e : mesh.elements)
    for (int c = 0; c < 4; ++c) {
      const Vector2 q = e.corner(c);
      loX = std::min(loX, q.x());
      hiX = std::max(hiX, q.x());
      loY = std::min(loY, q.y());
      hiY = std::max(hiY, q.y());
    }
  const Real scale = std::max({hiX - loX, hiY - loY, Real(1)});
  const Real quantum = 1e-9 * scale;
  const auto key = [&](const Vector2& q) {
    return Key{std::llround(q.x() / quantum), std::llround(q.y() / quantum)};
  };

  struct FaceRef {
    Index elem;
    int face;
    Vector2 start, end;
    Key startKey, endKey;
    bool matched = false;
  };
  std::vector<FaceRef> faces;
  faces.reserve(mesh.elements.size() * 4);
  for (Index e = 0; e < mesh.n_elements(); ++e)
    for (int f = 0; f < 4; ++f) {
      const auto [a, b] = face_endpoints(mesh.elements[e], f);
      faces.push_back({e, f, a, b, key(a), key(b), false});
    }

  const auto pairKey = [](const Key& a, const Key& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  };

  std::map<std::pair<Key, Key>, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < faces.size(); ++i)
    buckets[pairKey(faces[i].startKey, faces[i].endKey)].push_back(i);

  mesh.sides.clear();
  const auto emit = [&](std::size_t ia, std::size_t ib, const Vector2& shift) {
    FaceRef& fa = faces[ia];
    FaceRef& fb = faces[ib];
    fa.matched = fb.matched = true;
    // Master is the smaller element id; ties pick the smaller local face,
    // which makes the lower/left copy the master on self-periodic sides.
    bool aMaster = fa.elem != fb.elem ? fa.elem < fb.elem : fa.face < fb.face;
    const FaceRef& fm = aMaster ? fa : fb;
    const FaceRef& fs = aMaster ? fb : fa;
    // `shift` maps fa's frame into fb's; compare starts in fb's frame.
    const Vector2 aStart = fa.start + shift;
    const Vector2 sStart = aMaster ? fb.start : aStart;
    const Vector2 mStart = aMaster ? aStart : fb.start;
    Side s;
    s.master = fm.elem;
    s.masterFace = fm.face;
    s.slave = fs.elem;
    s.slaveFace = fs.face;
    s.flip = (key(mStart) == key(sStart)) ? 0 : 1;
    mesh.sides.push_back(s);
  };

  for (auto& [k, ids] : buckets) {
    if (ids.size() > 2)
      throw DgError("more than two faces share an edge; mesh is not 2-manifold");
    if (ids.size() == 2) emit(ids[0], ids[1], Vector2::Zero());
  }

  // Periodic pass: shift every unmatched face by the negative span and pair
  // it with an unmatched face at the image location.
  std::map<std::pair<Key, Key>, std::size_t> open;
  for (std::size_t i = 0; i < faces.size(); ++i)
    if (!faces[i].matched)
      open[pairKey(faces[i].startKey, faces[i].endKey)] = i;
  for (int dir = 0; dir < 2; ++dir) {
    const bool active = dir == 0 ? mesh.periodicX : mesh.periodicY;
    if (!active) continue;
    const Vector2 shift = dir == 0 ? Vector2(-mesh.spanX, 0.0) : Vector2(0.0, -mesh.spanY);
    for (std::size_t i = 0; i < faces.size(); ++i) {
      if (faces[i].matched) continue;
      const Key a = key(faces[i].start + shift);
      const Key b = key(faces[i].end + shift);
      const auto it = open.find(pairKey(a, b));
      if (it == open.end() || it->second == i || faces[it->second].matched) continue;
      emit(i, it->second, shift);
    }
  }

  for (const auto& f : faces) {
    if (f.matched) continue;
    const auto onPlane = [&](Real v, Real plane) { return std::abs(v - plane) <= quantum; };
    Side s;
    s.master = f.elem;
    s.masterFace = f.face;
    if (onPlane(f.start.x(), loX) && onPlane(f.end.x(), loX))
      s.bcTag = mesh.boundaryTags[0];
    else if (onPlane(f.start.x(), hiX) && onPlane(f.end.x(), hiX))
      s.bcTag = mesh.boundaryTags[1];
    else if (onPlane(f.start.y(), loY) && onPlane(f.end.y(), loY))
      s.bcTag = mesh.boundaryTags[2];
    else if (onPlane(f.start.y(), hiY) && onPlane(f.end.y(), hiY))
      s.bcTag = mesh.boundaryTags[3];
    else {
      std::ostringstream msg;
      msg << "unmatched interior face: element " << f.elem << " face " << f.face;
      throw DgError(msg.str());
    }
    mesh.sides.push_back(s);
  }

  canonicalize_sides(mesh);
  assign_partitions(mesh, 1);
}

void apply_curving(Mesh& mesh, const CurvingFunction& fn) {
  for (auto& e : mesh.elements)
    for (Index q = 0; q < e.mappingNodes.cols(); ++q) {
      const Vector2 moved = fn(Vector2(e.mappingNodes.col(q)));
      e.mappingNodes.col(q) = moved;
    }
  const ScaledJacobianReport report = scaled_jacobian(mesh);
  if (report.minimum <= 0.0) {
    std::ostringstream msg;
    msg << "curving folds the mapping; offending elements:";
    for (Index e = 0; e < report.perElement.size(); ++e)
      if (report.perElement[e] <= 0.0) msg << ' ' << e;
    throw DgError(msg.str());
  }
}

Mesh build_mortar_interfaces(const Mesh& mesh, const RefineRegion& region) {
  for (const auto& s : mesh.sides)
    if (s.mortar != MortarRole::None)
      throw DgError("refinement requires a conforming input mesh");

  const Index nOld = mesh.n_elements();
  std::vector<bool> refine(nOld, false);
  bool any = false;
  for (Index e = 0; e < nOld; ++e) {
    refine[e] = region.contains(mesh.elements[e].centroid());
    any = any || refine[e];
  }
  if (!any) return mesh;

  Mesh out;
  out.ngeo = mesh.ngeo;
  out.periodicX = mesh.periodicX;
  out.periodicY = mesh.periodicY;
  out.spanX = mesh.spanX;
  out.spanY = mesh.spanY;
  out.boundaryTags = mesh.boundaryTags;
  out.bcNames = mesh.bcNames;

  // Children keep the curve order: the parent key 4r expands to 4r+z with z
  // the child's own Morton position inside the parent.
  const int g = mesh.ngeo;
  const Vector cgl = cgl_nodes(g);
  const Vector lowPts = ((cgl.array() - 1.0) / 2.0).matrix();
  const Vector highPts = ((cgl.array() + 1.0) / 2.0).matrix();

  std::vector<std::array<Index, 4>> childId(nOld, {-1, -1, -1, -1});
  std::vector<Index> soloId(nOld, -1);
  struct NewElem {
    std::uint64_t key;
    Matrix mapping;
  };
  std::vector<NewElem> fresh;
  fresh.reserve(static_cast<std::size_t>(nOld) * 2);
  for (Index e = 0; e < nOld; ++e) {
    if (!refine[e]) {
      fresh.push_back({4ull * std::uint64_t(e), mesh.elements[e].mappingNodes});
      continue;
    }
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const Vector& xi = a == 0 ? lowPts : highPts;
        const Vector& eta = b == 0 ? lowPts : highPts;
        fresh.push_back({4ull * std::uint64_t(e) + std::uint64_t(a + 2 * b),
                         map_eval(mesh.elements[e], g, xi, eta)});
      }
  }
  std::sort(fresh.begin(), fresh.end(),
            [](const NewElem& a, const NewElem& b) { return a.key < b.key; });
  out.elements.resize(fresh.size());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    out.elements[i].mappingNodes = std::move(fresh[i].mapping);
    const std::uint64_t key = fresh[i].key;
    const Index parent = static_cast<Index>(key / 4);
    if (refine[parent])
      childId[parent][key % 4] = static_cast<Index>(i);
    else
      soloId[parent] = static_cast<Index>(i);
  }

  // Children of a parent that touch a given local face, in that parent's
  // own face-traversal order (lower first).
  static constexpr int kFaceChildren[4][2] = {{0, 2}, {1, 3}, {0, 1}, {2, 3}};

  std::vector<Side>& sides = out.sides;
  const auto normalize = [](Side s) {
    if (s.slave >= 0 && (s.slave < s.master ||
                         (s.slave == s.master && s.slaveFace < s.masterFace))) {
      std::swap(s.master, s.slave);
      std::swap(s.masterFace, s.slaveFace);
    }
    return s;
  };

  for (Index e = 0; e < nOld; ++e) {
    if (!refine[e]) continue;
    for (int b = 0; b < 2; ++b) {
      Side s;
      s.master = childId[e][0 + 2 * b];
      s.masterFace = 1;
      s.slave = childId[e][1 + 2 * b];
      s.slaveFace = 0;
      sides.push_back(s);
    }
    for (int a = 0; a < 2; ++a) {
      Side s;
      s.master = childId[e][a];
      s.masterFace = 3;
      s.slave = childId[e][a + 2];
      s.slaveFace = 2;
      sides.push_back(s);
    }
  }

  for (const Side& old : mesh.sides) {
    const bool mRef = refine[old.master];
    const bool sRef = old.slave >= 0 && refine[old.slave];
    if (old.is_boundary()) {
      if (!mRef) {
        Side s = old;
        s.master = soloId[old.master];
        sides.push_back(s);
      } else {
        for (int c = 0; c < 2; ++c) {
          Side s;
          s.master = childId[old.master][kFaceChildren[old.masterFace][c]];
          s.masterFace = old.masterFace;
          s.bcTag = old.bcTag;
          sides.push_back(s);
        }
      }
      continue;
    }
    if (!mRef && !sRef) {
      Side s = old;
      s.master = soloId[old.master];
      s.slave = soloId[old.slave];
      sides.push_back(normalize(s));
      continue;
    }
    if (mRef && sRef) {
      for (int c = 0; c < 2; ++c) {
        const int sc = old.flip ? 1 - c : c;
        Side s;
        s.master = childId[old.master][kFaceChildren[old.masterFace][c]];
        s.masterFace = old.masterFace;
        s.slave = childId[old.slave][kFaceChildren[old.slaveFace][sc]];
        s.slaveFace = old.slaveFace;
        s.flip = old.flip;
        sides.push_back(normalize(s));
      }
      continue;
    }
    // 2:1 interface. The coarse element owns the mortar and stays master.
    const Index bigOld = mRef ? old.slave : old.master;
    const int bigFace = mRef ? old.slaveFace : old.masterFace;
    const Index smallOld = mRef ? old.master : old.slave;
    const int smallFace = mRef ? old.masterFace : old.slaveFace;
    const Index c0 = childId[smallOld][kFaceChildren[smallFace][0]];
    const Index c1 = childId[smallOld][kFaceChildren[smallFace][1]];
    const Index lowerSmall = old.flip ? c1 : c0;
    const Index upperSmall = old.flip ? c0 : c1;

    Side parent;
    parent.master = soloId[bigOld];
    parent.masterFace = bigFace;
    parent.mortar = MortarRole::BigParent;
    const Index parentIdx = static_cast<Index>(sides.size());
    sides.push_back(parent);
    for (int c = 0; c < 2; ++c) {
      Side s;
      s.master = soloId[bigOld];
      s.masterFace = bigFace;
      s.slave = c == 0 ? lowerSmall : upperSmall;
      s.slaveFace = smallFace;
      s.flip = old.flip;
      s.mortar = c == 0 ? MortarRole::LowerChild : MortarRole::UpperChild;
      s.mortarParent = parentIdx;
      sides[parentIdx].mortarChildren[c] = static_cast<Index>(sides.size());
      sides.push_back(s);
    }
  }

  canonicalize_sides(out);
  assign_partitions(out, 1);
  return out;
}

void compute_metrics(Mesh& mesh, const NodalBasis& basis) {
  const int g = mesh.ngeo;
  const Index n = basis.count();
  const Vector cgl = cgl_nodes(g);
  const Matrix dGeo = build_diff_matrix(cgl);
  const int lglDegree = std::max(basis.degree, 1);
  const NodeSet lgl = build_nodes(lglDegree, NodeFamily::LegendreGaussLobatto);
  const Matrix toLgl = build_interpolation_matrix(cgl, lgl.nodes);
  const bool resample = basis.family == NodeFamily::LegendreGauss || basis.degree == 0;
  Matrix toSol;
  if (resample) toSol = build_interpolation_matrix(lgl.nodes, basis.nodes);
  const auto toSolution = [&](const Matrix& onGeo) {
    const Matrix onLgl = toLgl * onGeo * toLgl.transpose();
    return resample ? Matrix(toSol * onLgl * toSol.transpose()) : onLgl;
  };

  std::vector<Index> folded;
  for (Index eIdx = 0; eIdx < mesh.n_elements(); ++eIdx) {
    Element& e = mesh.elements[eIdx];
    // Derivatives ignore constants, so anchoring the coordinates at one
    // mapping node keeps every differenced value at the element scale; the
    // metric roundoff then shrinks with the element instead of carrying the
    // absolute position of the mesh.
    Matrix geo[2];
    Real shift[2];
    Matrix sol[2];
    for (int c = 0; c < 2; ++c) {
      geo[c] = coord_grid(e, c, g);
      shift[c] = geo[c](0, 0);
      geo[c].array() -= shift[c];
      sol[c] = toSolution(geo[c]);
    }
    // When the mapping fits in the solution space its derivatives do too, so
    // differencing on the small geometry grid and interpolating the result
    // keeps the metric identity intact with less roundoff. A mapping of
    // higher degree must be truncated onto the solution grid first.
    Matrix xXi, xEta, yXi, yEta;
    if (g <= basis.degree) {
      xXi = toSolution(dGeo * geo[0]);
      xEta = toSolution(geo[0] * dGeo.transpose());
      yXi = toSolution(dGeo * geo[1]);
      yEta = toSolution(geo[1] * dGeo.transpose());
    } else {
      xXi = basis.diff * sol[0];
      xEta = sol[0] * basis.diff.transpose();
      yXi = basis.diff * sol[1];
      yEta = sol[1] * basis.diff.transpose();
    }
    const Matrix jac = xXi.cwiseProduct(yEta) - xEta.cwiseProduct(yXi);
    if ((jac.array() <= 0.0).any()) folded.push_back(eIdx);

    e.xNodes.resize(2, n * n);
    e.metric.resize(4, n * n);
    e.jac.resize(n * n);
    const auto flat = [](const Matrix& mM) {
      return Eigen::Map<const Vector>(mM.data(), mM.size());
    };
    e.xNodes.row(0) = (flat(sol[0]).array() + shift[0]).transpose();
    e.xNodes.row(1) = (flat(sol[1]).array() + shift[1]).transpose();
    e.metric.row(0) = flat(yEta).transpose();
    e.metric.row(1) = (-flat(xEta)).transpose();
    e.metric.row(2) = (-flat(yXi)).transpose();
    e.metric.row(3) = flat(xXi).transpose();
    e.jac = flat(jac);
  }
  if (!folded.empty()) {
    std::ostringstream msg;
    msg << "non-positive Jacobian on the solution grid; elements:";
    for (Index e : folded) msg << ' ' << e;
    throw DgError(msg.str());
  }

  mesh.solutionDegree = basis.degree;
  mesh.solutionFamily = basis.family;

  const auto traceOf = [&](const Matrix& rows, int row, int face) {
    const Vector flatRow = rows.row(row).transpose();
    const Eigen::Map<const Matrix> nodal(flatRow.data(), n, n);
    return face_trace(nodal, face, basis);
  };

  // First pass covers everything that owns its geometry; mortar children are
  // filled afterwards from the parent trace so both sit in the parent frame.
  for (Side& s : mesh.sides) {
    if (s.is_mortar_child()) continue;
    const Element& e = mesh.elements[s.master];
    const int f = s.masterFace;
    const Real sign = (f == 0 || f == 2) ? -1.0 : 1.0;
    const int base = (f == 0 || f == 1) ? 0 : 2;
    Matrix ntilde(2, n);
    ntilde.row(0) = sign * traceOf(e.metric, base, f).transpose();
    ntilde.row(1) = sign * traceOf(e.metric, base + 1, f).transpose();
    s.surf = ntilde.colwise().norm();
    s.normal = ntilde.array().rowwise() / s.surf.transpose().array();
    s.xFace.resize(2, n);
    s.xFace.row(0) = traceOf(e.xNodes, 0, f).transpose();
    s.xFace.row(1) = traceOf(e.xNodes, 1, f).transpose();
  }

  const MortarMatrices mm = build_mortar_matrices(basis);
  for (Side& s : mesh.sides) {
    if (!s.is_mortar_child()) continue;
    const Side& parent = mesh.sides[s.mortarParent];
    const Matrix& interp = s.mortar == MortarRole::LowerChild ? mm.toLower : mm.toUpper;
    const Matrix ntildeParent =
        parent.normal.array().rowwise() * parent.surf.transpose().array();
    const Matrix ntilde = (interp * ntildeParent.transpose()).transpose();
    s.surf = ntilde.colwise().norm();
    s.normal = ntilde.array().rowwise() / s.surf.transpose().array();
    s.xFace = (interp * parent.xFace.transpose()).transpose();
  }
}

void assign_partitions(Mesh& mesh, int k) {
  const Index n = mesh.n_elements();
  if (k < 1 || Index(k) > n)
    throw DgError("partition count must be between 1 and the element count");

  Partitioning part;
  part.count = k;
  part.offsets.assign(static_cast<std::size_t>(k) + 1, 0);
  const Index base = n / k;
  const Index rem = n % k;
  for (int p = 0; p < k; ++p)
    part.offsets[p + 1] = part.offsets[p] + base + (Index(p) < rem ? 1 : 0);
  mesh.partitioning = part;

  // Roles are reset before alternation so the assignment depends only on the
  // mesh and k, not on any previous partitioning. The canonical master and
  // the side geometry never change; alternation only flags which element
  // evaluates the flux.
  for (Side& s : mesh.sides) s.swapRoles = false;
  std::map<std::pair<int, int>, int> alternation;
  for (Side& s : mesh.sides) {
    if (s.slave < 0) continue;
    const int pm = part.owner(s.master);
    const int ps = part.owner(s.slave);
    if (pm == ps) continue;
    // The coarse element must stay the mortar master, so children are pinned
    // and only conforming sides alternate.
    if (s.mortar != MortarRole::None) continue;
    const auto pair = std::minmax(pm, ps);
    if (alternation[{pair.first, pair.second}]++ % 2 == 1) s.swapRoles = true;
  }

  mesh.partitionSides.assign(k, SideGroups{});
  for (int p = 0; p < k; ++p) {
    SideGroups& gset = mesh.partitionSides[p];
    const auto push = [&](Index sid) { gset.order.push_back(sid); };
    for (Index sid = 0; sid < mesh.n_sides(); ++sid)
      if (mesh.sides[sid].is_boundary() && part.owner(mesh.sides[sid].master) == p)
        push(sid);
    gset.boundaryEnd = static_cast<Index>(gset.order.size());
    for (Index sid = 0; sid < mesh.n_sides(); ++sid) {
      const Side& s = mesh.sides[sid];
      if (s.is_boundary()) continue;
      const int pm = part.owner(s.master);
      if (s.slave < 0) {
        if (pm == p) push(sid);
        continue;
      }
      if (pm == p && part.owner(s.slave) == p) push(sid);
    }
    gset.innerEnd = static_cast<Index>(gset.order.size());
    // Crossing sides are grouped by the acting master, i.e. the element that
    // evaluates the flux after alternation.
    for (Index sid = 0; sid < mesh.n_sides(); ++sid) {
      const Side& s = mesh.sides[sid];
      if (s.is_boundary() || s.slave < 0) continue;
      const int pm = part.owner(s.swapRoles ? s.slave : s.master);
      const int ps = part.owner(s.swapRoles ? s.master : s.slave);
      if (pm == p && ps != p) push(sid);
    }
    gset.masterEnd = static_cast<Index>(gset.order.size());
    for (Index sid = 0; sid < mesh.n_sides(); ++sid) {
      const Side& s = mesh.sides[sid];
      if (s.is_boundary() || s.slave < 0) continue;
      const int pm = part.owner(s.swapRoles ? s.slave : s.master);
      const int ps = part.owner(s.swapRoles ? s.master : s.slave);
      if (ps == p && pm != p) push(sid);
    }
  }
}

ScaledJacobianReport scaled_jacobian(const Mesh& mesh) {
  const int g = mesh.ngeo;
  const Vector cgl = cgl_nodes(g);
  const int np = 2 * g + 1;
  Vector pts(np);
  for (int i = 0; i < np; ++i) pts[i] = -1.0 + 2.0 * double(i) / double(np - 1);
  const Matrix interp = build_interpolation_matrix(cgl, pts);
  const Matrix diff = build_diff_matrix(cgl);

  ScaledJacobianReport report;
  report.perElement.resize(mesh.n_elements());
  report.histogram = {0, 0, 0, 0, 0};
  for (Index eIdx = 0; eIdx < mesh.n_elements(); ++eIdx) {
    const Element& e = mesh.elements[eIdx];
    const Matrix x = coord_grid(e, 0, g);
    const Matrix y = coord_grid(e, 1, g);
    const Matrix xXi = interp * (diff * x) * interp.transpose();
    const Matrix xEta = interp * (x * diff.transpose()) * interp.transpose();
    const Matrix yXi = interp * (diff * y) * interp.transpose();
    const Matrix yEta = interp * (y * diff.transpose()) * interp.transpose();
    const Matrix jac = xXi.cwiseProduct(yEta) - xEta.cwiseProduct(yXi);
    const Real hi = jac.cwiseAbs().maxCoeff();
    const Real ratio = hi > 0.0 ? jac.minCoeff() / hi : -1.0;
    report.perElement[eIdx] = ratio;
    int bucket;
    if (ratio < 0.0)
      bucket = 0;
    else if (ratio < 0.1)
      bucket = 1;
    else if (ratio < 0.2)
      bucket = 2;
    else if (ratio < 0.3)
      bucket = 3;
    else
      bucket = 4;
    ++report.histogram[bucket];
  }
  report.minimum = mesh.n_elements() > 0 ? report.perElement.minCoeff() : 1.0;
  return report;
}

}  // namespace dgflux
