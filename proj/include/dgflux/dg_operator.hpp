#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "dgflux/basis.hpp"
#include "dgflux/equations.hpp"
#include "dgflux/fields.hpp"
#include "dgflux/mesh.hpp"
#include "dgflux/types.hpp"

namespace dgflux {

enum class Form { Weak, Strong, Split };

enum class SlopeLimiter { Minmod, Central, Zero };

// Per-element discretization: nodal DG polynomial or subcell finite volume.
// The state storage is always nodal; FV elements transfer to means and back
// inside each rhs evaluation, so the two kinds share one StateVector.
enum class ElementKind : std::uint8_t { Dg = 0, Fv = 1 };

struct DgOptions {
  Form form = Form::Weak;
  RiemannSolver solver = RiemannSolver::Rusanov;
  TwoPointVariant twoPoint = TwoPointVariant::StandardMean;
  SlopeLimiter limiter = SlopeLimiter::Minmod;
};

enum class BcKind { Dirichlet, SlipWall, NoSlipAdiabatic };

// Boundary data per tag. Dirichlet tags evaluate `exact` at face points; the
// wall kinds build their ghost state from the interior trace.
template <class System>
struct BoundaryConditions {
  std::map<int, BcKind> kinds;
  std::function<typename System::State(const Vector2&, Real)> exact;
};

enum class IndicatorKind { PerssonModal, JamesonPressure };

// Hysteresis band for DG/FV switching: an element turns FV above upper and
// returns to DG below lower; in between it keeps its kind.
struct IndicatorConfig {
  IndicatorKind kind = IndicatorKind::PerssonModal;
  Real upperThreshold = -3.0;
  Real lowerThreshold = -4.5;
  Real floorValue = -16.0;  // reported when the field has no modal energy
};

struct SwitchReport {
  Index toFv = 0;
  Index toDg = 0;
  Index keptDgAtMortar = 0;  // flagged elements pinned to DG by a mortar side
  Index fvCount = 0;         // FV elements after the update
};

// Subcell control-volume geometry of one element, derived from the degree-N
// metric interpolants so DG and FV integrate the same polynomial geometry.
// inner1* hold the integrated Ja^1 over the N interior faces normal to xi1
// (ascending xi1 index, one row per face, columns along xi2); inner2* the
// xi2 analogue transposed.
struct SubcellGeometry {
  Matrix jbar;              // (N+1)x(N+1) subcell means of J
  Matrix inner1x, inner1y;  // N x (N+1)
  Matrix inner2x, inner2y;  // (N+1) x N
};

// Semi-discrete hybrid DG/FV operator: dudt = -1/J * R(u, t). All work
// buffers are owned here and sized at construction, so a time integrator on
// top allocates nothing per step. rhs is a pure function of (u, t) and the
// current element kinds; results do not depend on the mesh partitioning.
template <class System>
class SpatialOperator {
 public:
  using State = typename System::State;
  using LiftState = typename System::LiftState;
  using LiftGrad = typename System::LiftGrad;

  SpatialOperator(const Mesh& mesh, const NodalBasis& basis, const System& eq,
                  const DgOptions& opts, BoundaryConditions<System> bcs);

  void rhs(const StateVector& u, Real t, StateVector& dudt);

  const std::vector<ElementKind>& element_kinds() const { return kind_; }
  void set_element_kinds(const std::vector<ElementKind>& kinds);
  Index fv_count() const;

  // Troubled-cell indicator and hysteresis switching, evaluated once per
  // time step on the step's start state. A switch to FV replaces the nodal
  // data with its subcell-mean projection, so the state argument mutates.
  Real indicator_value(const StateVector& u, Real t, Index elem,
                       const IndicatorConfig& cfg);
  SwitchReport update_representation(StateVector& u, Real t,
                                     const IndicatorConfig& cfg);

  // BR1 gradients of the lifted variables from the last rhs evaluation;
  // rhs populates them for viscous systems only. lift_gradients runs the
  // trace and lifting stages alone, so exports can derive quantities like
  // vorticity for inviscid runs too.
  void lift_gradients(const StateVector& u, Real t);
  const Matrix& grad_x(Index elem, int liftVar) const;
  const Matrix& grad_y(Index elem, int liftVar) const;

  const Mesh& mesh() const { return *mesh_; }
  const NodalBasis& basis() const { return *basis_; }
  const System& equations() const { return eq_; }
  const DgOptions& options() const { return opts_; }
  const FvVandermonde& fv_vandermonde() const { return fvv_; }
  const SubcellGeometry& subcell_geometry(Index elem);

 private:
  static constexpr int kVars = System::kVars;
  static constexpr int kLift = System::kLiftVars;

  // Everything a side exchanges, stored in master orientation. Mortar child
  // sides live in the parent's frame; the parent slot of a mortar holds the
  // projected flux. fv* slots are used when an adjacent element is FV.
  struct SideWork {
    Matrix um, up;                 // solution traces, kVars x n
    Matrix qm, qp;                 // lifted-variable traces, kLift x n
    Matrix gxm, gxp, gym, gyp;     // gradient traces, kLift x n
    Matrix lsx, lsy;               // lifting surface data q* ntilde_d shat
    Matrix flux;                   // total normal flux times shat, kVars x n
    Matrix fvm, fvp;               // adjacent subcell means at face subcells
    Matrix fluxFv;                 // integrated flux per face subcell
    bool fvActive = false;
  };

  void compute_traces(const StateVector& u, Real t);
  void compute_gradients(const StateVector& u, Real t);
  void size_lift_buffers();
  void compute_side_fluxes(Real t);
  void accumulate_element(Index e, const StateVector& u, StateVector& dudt);

  // Subcell FV path; definitions live with the subcell scheme.
  void fv_compute_means(const StateVector& u);
  void fv_reconstruct(Real t);
  void fv_side_flux(Index sid, Real t);
  void fv_element_update(Index e, StateVector& dudt);
  // Face-adjacent subcell means / the neighbor's payload / reconstructed
  // conserved face states, all in element e's own face traversal.
  Matrix fv_adjacent_means(Index e, int f) const;
  Matrix fv_neighbor_means(Index e, int f) const;
  Matrix fv_face_values(Index e, int f) const;

  Matrix trace_vars(const StateVector& u, Index e, int face) const;
  // Stacks face traces of per-variable nodal fields stored elem*count + v.
  Matrix stack_trace(const std::vector<Matrix>& nodal, Index e, int count,
                     int face) const;
  void fill_ghost(const Side& s, SideWork& w, Real t) const;
  State ghost_state(BcKind kind, const State& inner, const Vector2& nhat,
                    const Vector2& x, Real t) const;
  // Face payload of element e at local face f in its own traversal,
  // outward-oriented: +1, -1 with flip, or -1/2 with flip across a mortar.
  void gather_face(Index e, int f, Matrix SideWork::*slot, Matrix& out) const;
  void load_states(const StateVector& u, Index e);

  Real indicator_persson(const StateVector& u, Index elem,
                         const IndicatorConfig& cfg);
  Real indicator_jameson(const StateVector& u, Index elem) const;

  const Mesh* mesh_;
  const NodalBasis* basis_;
  System eq_;
  DgOptions opts_;
  BoundaryConditions<System> bcs_;
  Index n_;  // nodes per direction
  MortarMatrices mm_;
  FvVandermonde fvv_;
  Matrix modalInv_;  // nodal-to-Legendre-modal transform
  std::vector<BcKind> bcKindBySide_;

  std::vector<ElementKind> kind_;
  bool anyFv_ = false;
  std::vector<SideWork> side_;

  std::vector<Matrix> qLift_;           // elem * kLift + v, n x n nodal
  std::vector<Matrix> gradX_, gradY_;   // same layout

  std::vector<Matrix> means_;            // elem * kVars + v, conserved means
  std::vector<Matrix> prim_;             // primitive means, same layout
  std::vector<Matrix> slopeX_, slopeY_;  // primitive slopes per subcell
  std::map<Index, SubcellGeometry> fvGeom_;

  // per-element assembly scratch
  std::vector<State> uNode_;
  std::vector<Matrix> f1_, f2_;    // contravariant flux per variable
  std::vector<Matrix> fv1_, fv2_;  // viscous part, kept apart for split form
  std::vector<Matrix> acc_;
  std::array<Matrix, 4> faceF_;
  std::array<std::array<Matrix, 4>, 2> liftGather_;
  std::array<Vector, 4> faceVec_;
};

}  // namespace dgflux
