#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dgflux/basis.hpp"
#include "dgflux/types.hpp"

namespace dgflux {

enum class MortarRole : std::uint8_t {
  None = 0,
  BigParent = 1,   // virtual side owned by the coarse element, no slave
  LowerChild = 2,  // covers parent face coordinate [-1, 0]
  UpperChild = 3,  // covers parent face coordinate [0, 1]
};

struct Element {
  // Tensor-product Chebyshev-Lobatto mapping nodes, 2 x (ngeo+1)^2,
  // xi1 index fastest. The mapping polynomial is the single source of
  // geometric truth; everything else is derived from it.
  Matrix mappingNodes;
  std::array<Index, 4> sideIds{-1, -1, -1, -1};

  // Filled by compute_metrics on the solution grid, (N+1)x(N+1) column-major
  // flattened with xi1 fastest.
  Vector jac;      // volume Jacobian J
  Matrix metric;   // 4 x (N+1)^2 rows: Ja1_x, Ja1_y, Ja2_x, Ja2_y
  Matrix xNodes;   // 2 x (N+1)^2 physical solution-node positions

  Vector2 corner(int c) const;    // 0:(-,-) 1:(+,-) 2:(-,+) 3:(+,+)
  Vector2 centroid() const;       // mean of the four corners
};

struct Side {
  Index master = -1;
  Index slave = -1;   // -1 for boundary sides and mortar parents
  int masterFace = -1;
  int slaveFace = -1;
  int flip = 0;       // 1: slave traversal runs opposite the master's
  int bcTag = -1;     // >= 0 marks a physical boundary

  MortarRole mortar = MortarRole::None;
  Index mortarParent = -1;                 // set on children
  std::array<Index, 2> mortarChildren{-1, -1};  // set on the parent

  // Partition alternation marker. When set, the flux for this side is
  // evaluated from the slave's perspective (arguments swapped, normal
  // negated); the stored ids and geometry keep the canonical orientation.
  // Not serialized: it belongs to the current partitioning, not the mesh.
  bool swapRoles = false;

  // Geometry at the side's face nodes in master traversal order. Mortar
  // children store the interpolated trace of the parent's metric normal,
  // so their surf carries twice the small element's own face measure.
  Matrix normal;  // 2 x (N+1), unit outward normal of the master element
  Vector surf;    // (N+1) surface scale |n~|
  Matrix xFace;   // 2 x (N+1) physical face positions

  bool is_boundary() const { return bcTag >= 0; }
  bool is_mortar_child() const {
    return mortar == MortarRole::LowerChild || mortar == MortarRole::UpperChild;
  }
};

struct Partitioning {
  int count = 1;
  std::vector<Index> offsets{0, 0};  // count+1 entries, contiguous id ranges
  int owner(Index elem) const;
};

// Per-partition side processing order: [boundary | inner | partition-master |
// partition-slave]. Indices refer into Mesh::sides.
struct SideGroups {
  std::vector<Index> order;
  Index boundaryEnd = 0;
  Index innerEnd = 0;
  Index masterEnd = 0;
};

struct Mesh {
  int ngeo = 1;
  bool periodicX = false;
  bool periodicY = false;
  Real spanX = 0.0;
  Real spanY = 0.0;
  std::array<int, 4> boundaryTags{1, 2, 3, 4};
  std::map<int, std::string> bcNames;

  std::vector<Element> elements;
  std::vector<Side> sides;

  // Set by compute_metrics.
  int solutionDegree = -1;
  NodeFamily solutionFamily = NodeFamily::LegendreGaussLobatto;

  // Set by assign_partitions; defaults to a single partition.
  Partitioning partitioning;
  std::vector<SideGroups> partitionSides;

  Index n_elements() const { return static_cast<Index>(elements.size()); }
  Index n_sides() const { return static_cast<Index>(sides.size()); }
};

struct GenerateParams {
  Index nx = 1;
  Index ny = 1;
  Real x0 = 0.0, x1 = 1.0;
  Real y0 = 0.0, y1 = 1.0;
  int ngeo = 1;
  bool periodicX = false;
  bool periodicY = false;
  std::array<int, 4> bcTags{1, 2, 3, 4};  // -x, +x, -y, +y
};

// Space-filling-curve element order.
std::uint64_t morton_encode(std::uint32_t i, std::uint32_t j);
std::pair<std::uint32_t, std::uint32_t> morton_decode(std::uint64_t code);

Mesh generate_cartesian(const GenerateParams& params);

// Rebuilds Mesh::sides from element corner geometry: conforming faces are
// matched by endpoint pairs (periodic images via the stored spans), the
// rest are classified against the bounding box and tagged.
void connect_sides(Mesh& mesh);

using CurvingFunction = std::function<Vector2(const Vector2&)>;

// Displaces every mapping node; rejects mappings that fold anywhere in the
// sampled scaled-Jacobian sense. Must run before refinement so children can
// inherit the parent polynomial exactly.
void apply_curving(Mesh& mesh, const CurvingFunction& fn);

struct RefineRegion {
  Real xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool contains(const Vector2& p) const;
};

// Isotropically splits every element whose centroid lies in the region and
// rebuilds connectivity with 2:1 mortar sides where refinement levels meet.
// Requires a conforming input mesh; children stay contiguous on the curve.
Mesh build_mortar_interfaces(const Mesh& mesh, const RefineRegion& region);

// Evaluates mapping derivatives on the solution grid. The mapping is first
// interpolated to the degree-N Lobatto grid, then resampled to the solution
// nodes, which keeps face traces single-valued even when ngeo exceeds N.
void compute_metrics(Mesh& mesh, const NodalBasis& basis);

// Splits the element range into k contiguous pieces and derives the side
// groups, alternating master ownership along each partition pair so the
// exchange roles stay balanced.
void assign_partitions(Mesh& mesh, int k);

struct ScaledJacobianReport {
  Vector perElement;                 // min J / max |J| on a dense sample grid
  std::array<Index, 5> histogram{};  // (<0, 0-0.1, 0.1-0.2, 0.2-0.3, >=0.3)
  Real minimum = 0.0;
};

ScaledJacobianReport scaled_jacobian(const Mesh& mesh);

// Binary mesh file: fixed-stride element records in curve order so ranges
// can be read without loading the whole file, CRC32 trailer over the body.
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);
std::vector<Element> read_element_range(const std::string& path, Index first,
                                        Index count);

// Content hash of the topology and geometry, used to pin checkpoints to the
// mesh they were produced on.
std::uint32_t mesh_fingerprint(const Mesh& mesh);

// Chebyshev-Lobatto points -cos(pi*i/n); the geometry node family.
Vector cgl_nodes(int n);

// Evaluates the mapping polynomial of one element at arbitrary reference
// points (tensor grid xi x eta), returning 2 x (nxi*neta), xi fastest.
Matrix map_eval(const Element& elem, int ngeo, const Vector& xi,
                const Vector& eta);

}  // namespace dgflux
