#include "dgflux/dg_operator.hpp"

#include <cmath>
#include <sstream>

#include "dgflux/lifting.hpp"
#include "dgflux/mortar.hpp"
#include "dgflux/tensor.hpp"

namespace dgflux {

namespace {

void flip_cols(Matrix& m) {
  const Index c = m.cols();
  for (Index k = 0; k < c / 2; ++k) m.col(k).swap(m.col(c - 1 - k));
}

// Inverse Vandermonde of the L2-normalized Legendre basis at the solution
// nodes; maps nodal values to modal coefficients for the smoothness sensor.
Matrix modal_transform(const NodalBasis& b) {
  const Index n = b.count();
  Matrix v(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      v(i, j) = legendre(static_cast<int>(j), b.nodes[i]).value *
                std::sqrt((2.0 * j + 1.0) / 2.0);
  return v.inverse();
}

}  // namespace

template <class System>
SpatialOperator<System>::SpatialOperator(const Mesh& mesh, const NodalBasis& basis,
                                         const System& eq, const DgOptions& opts,
                                         BoundaryConditions<System> bcs)
    : mesh_(&mesh),
      basis_(&basis),
      eq_(eq),
      opts_(opts),
      bcs_(std::move(bcs)),
      n_(basis.count()) {
  if (mesh.solutionDegree != basis.degree || mesh.solutionFamily != basis.family)
    throw DgError("mesh metrics were computed on a different solution basis");
  if (opts_.form == Form::Split && basis.family != NodeFamily::LegendreGaussLobatto)
    throw ConfigError("the split form needs the diagonal-boundary summation-by-parts "
                      "property and is only available on Gauss-Lobatto nodes");

  bcKindBySide_.assign(mesh.sides.size(), BcKind::Dirichlet);
  for (Index sid = 0; sid < mesh.n_sides(); ++sid) {
    const Side& s = mesh.sides[sid];
    if (!s.is_boundary()) continue;
    const auto it = bcs_.kinds.find(s.bcTag);
    if (it == bcs_.kinds.end()) {
      std::ostringstream msg;
      msg << "no boundary condition given for tag " << s.bcTag;
      throw ConfigError(msg.str());
    }
    if (kVars == 1 && it->second != BcKind::Dirichlet)
      throw ConfigError("wall boundaries are undefined for the scalar system");
    if (it->second == BcKind::Dirichlet && !bcs_.exact)
      throw ConfigError("Dirichlet boundaries need an exact-state function");
    bcKindBySide_[sid] = it->second;
  }

  mm_ = build_mortar_matrices(basis);
  fvv_ = build_fv_vandermonde(basis);
  modalInv_ = modal_transform(basis);
  kind_.assign(mesh.elements.size(), ElementKind::Dg);

  const Index n = n_;
  side_.resize(mesh.sides.size());
  for (SideWork& w : side_) {
    w.um.setZero(kVars, n);
    w.up.setZero(kVars, n);
    w.flux.setZero(kVars, n);
    w.fvm.setZero(kVars, n);
    w.fvp.setZero(kVars, n);
    w.fluxFv.setZero(kVars, n);
  }
  if (eq_.viscous()) size_lift_buffers();
  uNode_.resize(n * n);
  f1_.resize(kVars);
  f2_.resize(kVars);
  acc_.resize(kVars);
  for (int v = 0; v < kVars; ++v) {
    f1_[v].setZero(n, n);
    f2_[v].setZero(n, n);
    acc_[v].setZero(n, n);
  }
  for (Matrix& m : faceF_) m.setZero(kVars, n);
  for (Vector& v : faceVec_) v.setZero(n);
}

template <class System>
void SpatialOperator<System>::size_lift_buffers() {
  if (!qLift_.empty()) return;
  const Index n = n_;
  for (SideWork& w : side_) {
    w.qm.setZero(kLift, n);
    w.qp.setZero(kLift, n);
    w.gxm.setZero(kLift, n);
    w.gxp.setZero(kLift, n);
    w.gym.setZero(kLift, n);
    w.gyp.setZero(kLift, n);
    w.lsx.setZero(kLift, n);
    w.lsy.setZero(kLift, n);
  }
  const Index nLift = mesh_->n_elements() * kLift;
  qLift_.resize(nLift);
  gradX_.resize(nLift);
  gradY_.resize(nLift);
  for (Index k = 0; k < nLift; ++k) {
    qLift_[k].setZero(n, n);
    gradX_[k].setZero(n, n);
    gradY_[k].setZero(n, n);
  }
  fv1_.resize(kVars);
  fv2_.resize(kVars);
  for (int v = 0; v < kVars; ++v) {
    fv1_[v].setZero(n, n);
    fv2_[v].setZero(n, n);
  }
  for (auto& dir : liftGather_)
    for (Matrix& m : dir) m.setZero(kLift, n);
}

template <class System>
void SpatialOperator<System>::lift_gradients(const StateVector& u, Real t) {
  size_lift_buffers();
  if (anyFv_) fv_compute_means(u);
  compute_traces(u, t);
  compute_gradients(u, t);
}

template <class System>
void SpatialOperator<System>::set_element_kinds(const std::vector<ElementKind>& kinds) {
  if (static_cast<Index>(kinds.size()) != mesh_->n_elements())
    throw DgError("element-kind vector does not match the mesh");
  bool any = false;
  for (Index e = 0; e < mesh_->n_elements(); ++e) {
    if (kinds[e] != ElementKind::Fv) continue;
    if (eq_.viscous())
      throw ConfigError("subcell FV elements are advective only; viscous systems "
                        "must stay DG everywhere");
    any = true;
    for (int f = 0; f < 4; ++f) {
      const Side& s = mesh_->sides[mesh_->elements[e].sideIds[f]];
      if (s.mortar != MortarRole::None) {
        std::ostringstream msg;
        msg << "element " << e << " touches a mortar interface and cannot switch to FV";
        throw DgError(msg.str());
      }
    }
  }
  kind_ = kinds;
  anyFv_ = any;
  if (any && means_.empty()) {
    const Index total = mesh_->n_elements() * kVars;
    means_.resize(total);
    prim_.resize(total);
    slopeX_.resize(total);
    slopeY_.resize(total);
    for (Index k = 0; k < total; ++k) {
      means_[k].setZero(n_, n_);
      prim_[k].setZero(n_, n_);
      slopeX_[k].setZero(n_, n_);
      slopeY_[k].setZero(n_, n_);
    }
  }
}

template <class System>
Index SpatialOperator<System>::fv_count() const {
  Index c = 0;
  for (ElementKind k : kind_)
    if (k == ElementKind::Fv) ++c;
  return c;
}

template <class System>
const Matrix& SpatialOperator<System>::grad_x(Index elem, int liftVar) const {
  if (gradX_.empty()) throw DgError("gradients have not been lifted yet");
  return gradX_[elem * kLift + liftVar];
}

template <class System>
const Matrix& SpatialOperator<System>::grad_y(Index elem, int liftVar) const {
  if (gradY_.empty()) throw DgError("gradients have not been lifted yet");
  return gradY_[elem * kLift + liftVar];
}

template <class System>
void SpatialOperator<System>::load_states(const StateVector& u, Index e) {
  for (int v = 0; v < kVars; ++v) {
    const auto m = u.var(e, v);
    for (Index j = 0; j < n_; ++j)
      for (Index i = 0; i < n_; ++i) uNode_[j * n_ + i][v] = m(i, j);
  }
}

template <class System>
Matrix SpatialOperator<System>::trace_vars(const StateVector& u, Index e, int face) const {
  Matrix out(kVars, n_);
  for (int v = 0; v < kVars; ++v)
    out.row(v) = face_trace(u.var(e, v), face, *basis_).transpose();
  return out;
}

template <class System>
Matrix SpatialOperator<System>::stack_trace(const std::vector<Matrix>& nodal, Index e,
                                            int count, int face) const {
  Matrix out(count, n_);
  for (int v = 0; v < count; ++v)
    out.row(v) = face_trace(nodal[e * count + v], face, *basis_).transpose();
  return out;
}

template <class System>
typename System::State SpatialOperator<System>::ghost_state(BcKind kind, const State& inner,
                                                            const Vector2& nhat,
                                                            const Vector2& x, Real t) const {
  if (kind == BcKind::Dirichlet) return bcs_.exact(x, t);
  if constexpr (kVars == 4) {
    State g = inner;
    if (kind == BcKind::SlipWall) {
      const Real mn = inner[1] * nhat.x() + inner[2] * nhat.y();
      g[1] -= 2.0 * mn * nhat.x();
      g[2] -= 2.0 * mn * nhat.y();
    } else {
      g[1] = -inner[1];
      g[2] = -inner[2];
    }
    return g;
  } else {
    throw ConfigError("wall boundaries are undefined for the scalar system");
  }
}

template <class System>
void SpatialOperator<System>::fill_ghost(const Side& s, SideWork& w, Real t) const {
  const BcKind kind = bcKindBySide_[&s - mesh_->sides.data()];
  for (Index k = 0; k < n_; ++k) {
    const State inner = w.um.col(k);
    const Vector2 nh = s.normal.col(k);
    const Vector2 x = s.xFace.col(k);
    w.up.col(k) = ghost_state(kind, inner, nh, x, t);
  }
}

template <class System>
void SpatialOperator<System>::compute_traces(const StateVector& u, Real t) {
  const auto& sides = mesh_->sides;
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    SideWork& w = side_[sid];
    w.fvActive = anyFv_ && (kind_[s.master] == ElementKind::Fv ||
                            (s.slave >= 0 && kind_[s.slave] == ElementKind::Fv));
    if (s.mortar == MortarRole::BigParent) continue;
    if (s.is_mortar_child()) {
      w.um = mortar_to_child(mm_, s.mortar, trace_vars(u, s.master, s.masterFace));
      w.up = trace_vars(u, s.slave, s.slaveFace);
      if (s.flip) flip_cols(w.up);
    } else if (s.is_boundary()) {
      w.um = trace_vars(u, s.master, s.masterFace);
      fill_ghost(s, w, t);
    } else {
      w.um = trace_vars(u, s.master, s.masterFace);
      w.up = trace_vars(u, s.slave, s.slaveFace);
      if (s.flip) flip_cols(w.up);
    }
  }
}

template <class System>
void SpatialOperator<System>::compute_gradients(const StateVector& u, Real t) {
  (void)t;
  const auto& sides = mesh_->sides;
  const Index nE = mesh_->n_elements();
  for (Index e = 0; e < nE; ++e) {
    load_states(u, e);
    for (Index j = 0; j < n_; ++j)
      for (Index i = 0; i < n_; ++i) {
        const LiftState q = lifted_variables(eq_, uNode_[j * n_ + i]);
        for (int lv = 0; lv < kLift; ++lv) qLift_[e * kLift + lv](i, j) = q[lv];
      }
  }

  // Interface values of the lifted field and the lifting surface data
  // q* ntilde_d shat, in master orientation.
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    SideWork& w = side_[sid];
    if (s.mortar == MortarRole::BigParent) continue;
    if (s.is_mortar_child()) {
      w.qm = mortar_to_child(mm_, s.mortar, stack_trace(qLift_, s.master, kLift, s.masterFace));
      w.qp = stack_trace(qLift_, s.slave, kLift, s.slaveFace);
      if (s.flip) flip_cols(w.qp);
    } else {
      w.qm = stack_trace(qLift_, s.master, kLift, s.masterFace);
      if (s.is_boundary()) {
        // up already holds the ghost state from the trace pass
        for (Index k = 0; k < n_; ++k)
          w.qp.col(k) = lifted_variables(eq_, State(w.up.col(k)));
      } else {
        w.qp = stack_trace(qLift_, s.slave, kLift, s.slaveFace);
        if (s.flip) flip_cols(w.qp);
      }
    }
    const bool dirichlet = s.is_boundary() && bcKindBySide_[sid] == BcKind::Dirichlet;
    for (Index k = 0; k < n_; ++k) {
      Eigen::Matrix<Real, kLift, 1> qs;
      if (dirichlet)
        qs = w.qp.col(k);
      else
        qs = 0.5 * (w.qm.col(k) + w.qp.col(k));
      w.lsx.col(k) = qs * (s.normal(0, k) * s.surf[k]);
      w.lsy.col(k) = qs * (s.normal(1, k) * s.surf[k]);
    }
  }
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    if (s.mortar != MortarRole::BigParent) continue;
    SideWork& w = side_[sid];
    w.lsx = mortar_project(mm_, side_[s.mortarChildren[0]].lsx, side_[s.mortarChildren[1]].lsx);
    w.lsy = mortar_project(mm_, side_[s.mortarChildren[0]].lsy, side_[s.mortarChildren[1]].lsy);
  }

  for (Index e = 0; e < nE; ++e) {
    const Element& el = mesh_->elements[e];
    for (int f = 0; f < 4; ++f) {
      gather_face(e, f, &SideWork::lsx, liftGather_[0][f]);
      gather_face(e, f, &SideWork::lsy, liftGather_[1][f]);
    }
    for (int lv = 0; lv < kLift; ++lv) {
      for (int f = 0; f < 4; ++f) faceVec_[f] = liftGather_[0][f].row(lv).transpose();
      gradX_[e * kLift + lv] = br1_gradient(*basis_, el, 0, qLift_[e * kLift + lv], faceVec_);
      for (int f = 0; f < 4; ++f) faceVec_[f] = liftGather_[1][f].row(lv).transpose();
      gradY_[e * kLift + lv] = br1_gradient(*basis_, el, 1, qLift_[e * kLift + lv], faceVec_);
    }
  }

  // Gradient traces feed the viscous surface flux. Boundaries copy the
  // interior gradient to the ghost side.
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    SideWork& w = side_[sid];
    if (s.mortar == MortarRole::BigParent) continue;
    if (s.is_mortar_child()) {
      w.gxm = mortar_to_child(mm_, s.mortar, stack_trace(gradX_, s.master, kLift, s.masterFace));
      w.gym = mortar_to_child(mm_, s.mortar, stack_trace(gradY_, s.master, kLift, s.masterFace));
      w.gxp = stack_trace(gradX_, s.slave, kLift, s.slaveFace);
      w.gyp = stack_trace(gradY_, s.slave, kLift, s.slaveFace);
      if (s.flip) {
        flip_cols(w.gxp);
        flip_cols(w.gyp);
      }
    } else if (s.is_boundary()) {
      w.gxm = stack_trace(gradX_, s.master, kLift, s.masterFace);
      w.gym = stack_trace(gradY_, s.master, kLift, s.masterFace);
      w.gxp = w.gxm;
      w.gyp = w.gym;
    } else {
      w.gxm = stack_trace(gradX_, s.master, kLift, s.masterFace);
      w.gym = stack_trace(gradY_, s.master, kLift, s.masterFace);
      w.gxp = stack_trace(gradX_, s.slave, kLift, s.slaveFace);
      w.gyp = stack_trace(gradY_, s.slave, kLift, s.slaveFace);
      if (s.flip) {
        flip_cols(w.gxp);
        flip_cols(w.gyp);
      }
    }
  }
}

template <class System>
void SpatialOperator<System>::compute_side_fluxes(Real t) {
  const auto& sides = mesh_->sides;
  const bool visc = eq_.viscous();
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    SideWork& w = side_[sid];
    if (s.mortar == MortarRole::BigParent) continue;
    if (w.fvActive) {
      fv_side_flux(sid, t);
      continue;
    }
    if (s.is_boundary()) {
      const BcKind kind = bcKindBySide_[sid];
      for (Index k = 0; k < n_; ++k) {
        const Vector2 nh = s.normal.col(k);
        const State a = w.um.col(k);
        const State b = w.up.col(k);
        State f = riemann_flux(eq_, opts_.solver, opts_.twoPoint, a, b, nh);
        if (visc) {
          LiftGrad g;
          g.col(0) = w.gxm.col(k);
          g.col(1) = w.gym.col(k);
          // an adiabatic wall carries no normal heat flux; drop the
          // temperature gradient instead of prescribing one
          if (kind == BcKind::NoSlipAdiabatic) g.row(kLift - 1).setZero();
          const State ub = kind == BcKind::Dirichlet ? b : State(0.5 * (a + b));
          const auto fb = viscous_flux(eq_, ub, g);
          f -= fb.col(0) * nh.x() + fb.col(1) * nh.y();
        }
        w.flux.col(k) = s.surf[k] * f;
      }
      continue;
    }
    // Interior and mortar-child sides. With swapped roles the flux is
    // evaluated from the slave's perspective and negated; the two produce
    // bitwise-identical stored values, which keeps runs partition-invariant.
    const bool sw = s.swapRoles;
    const Matrix& ua = sw ? w.up : w.um;
    const Matrix& ub = sw ? w.um : w.up;
    const Matrix& gxa = sw ? w.gxp : w.gxm;
    const Matrix& gxb = sw ? w.gxm : w.gxp;
    const Matrix& gya = sw ? w.gyp : w.gym;
    const Matrix& gyb = sw ? w.gym : w.gyp;
    for (Index k = 0; k < n_; ++k) {
      Vector2 nh = s.normal.col(k);
      if (sw) nh = -nh;
      const State a = ua.col(k);
      const State b = ub.col(k);
      State f = riemann_flux(eq_, opts_.solver, opts_.twoPoint, a, b, nh);
      if (visc) {
        LiftGrad ga, gb;
        ga.col(0) = gxa.col(k);
        ga.col(1) = gya.col(k);
        gb.col(0) = gxb.col(k);
        gb.col(1) = gyb.col(k);
        f -= viscous_surface_flux(eq_, a, b, ga, gb, nh);
      }
      const Real scale = sw ? -s.surf[k] : s.surf[k];
      w.flux.col(k) = scale * f;
    }
  }
  // Parent mortar fluxes are the L2 projection of the children's, which are
  // already scaled by the parent-frame surface element.
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    if (s.mortar != MortarRole::BigParent) continue;
    side_[sid].flux = mortar_project(mm_, side_[s.mortarChildren[0]].flux,
                                     side_[s.mortarChildren[1]].flux);
  }
}

template <class System>
void SpatialOperator<System>::gather_face(Index e, int f, Matrix SideWork::*slot,
                                          Matrix& out) const {
  const Index sid = mesh_->elements[e].sideIds[f];
  const Side& s = mesh_->sides[sid];
  const Matrix& src = side_[sid].*slot;
  if (s.mortar == MortarRole::BigParent) {
    out = src;
    return;
  }
  if (s.is_mortar_child()) {
    // the stored side lives in the parent frame; the small element sees the
    // opposite orientation and half the parent-frame surface element
    out = -0.5 * src;
    if (s.flip) flip_cols(out);
    return;
  }
  if (s.master == e && s.masterFace == f) {
    out = src;
    return;
  }
  out = -src;
  if (s.flip) flip_cols(out);
}

template <class System>
void SpatialOperator<System>::accumulate_element(Index e, const StateVector& u,
                                                 StateVector& dudt) {
  const Element& el = mesh_->elements[e];
  const Index n = n_;
  const bool visc = eq_.viscous();
  const bool split = opts_.form == Form::Split;
  load_states(u, e);

  // Nodal contravariant fluxes. The split form keeps the viscous part
  // separate: its volume term stays a strong divergence while the advective
  // part is replaced by the two-point sweep.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Index idx = j * n + i;
      const State& q = uNode_[idx];
      typename System::Flux fl = physical_flux(eq_, q);
      typename System::Flux fw;
      if (visc) {
        LiftGrad g;
        for (int lv = 0; lv < kLift; ++lv) {
          g(lv, 0) = gradX_[e * kLift + lv](i, j);
          g(lv, 1) = gradY_[e * kLift + lv](i, j);
        }
        fw = viscous_flux(eq_, q, g);
        fl -= fw;
      }
      const Real a1x = el.metric(0, idx), a1y = el.metric(1, idx);
      const Real a2x = el.metric(2, idx), a2y = el.metric(3, idx);
      for (int v = 0; v < kVars; ++v) {
        f1_[v](i, j) = fl(v, 0) * a1x + fl(v, 1) * a1y;
        f2_[v](i, j) = fl(v, 0) * a2x + fl(v, 1) * a2y;
        if (visc && split) {
          fv1_[v](i, j) = fw(v, 0) * a1x + fw(v, 1) * a1y;
          fv2_[v](i, j) = fw(v, 0) * a2x + fw(v, 1) * a2y;
        }
      }
    }

  if (split) {
    for (int v = 0; v < kVars; ++v) acc_[v].setZero();
    // xi1 sweep: R_ij += sum_a 2 D_ia F#(u_ij, u_aj) . avg(Ja1_ij, Ja1_aj)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Index idx = j * n + i;
        const Real a1x = el.metric(0, idx), a1y = el.metric(1, idx);
        for (Index al = 0; al < n; ++al) {
          const Index adx = j * n + al;
          const auto fs = two_point_flux(eq_, opts_.twoPoint, uNode_[idx], uNode_[adx]);
          const Real mx = 0.5 * (a1x + el.metric(0, adx));
          const Real my = 0.5 * (a1y + el.metric(1, adx));
          const Real d2 = 2.0 * basis_->diff(i, al);
          for (int v = 0; v < kVars; ++v) acc_[v](i, j) += d2 * (fs(v, 0) * mx + fs(v, 1) * my);
        }
      }
    // xi2 sweep
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Index idx = j * n + i;
        const Real a2x = el.metric(2, idx), a2y = el.metric(3, idx);
        for (Index be = 0; be < n; ++be) {
          const Index bdx = be * n + i;
          const auto fs = two_point_flux(eq_, opts_.twoPoint, uNode_[idx], uNode_[bdx]);
          const Real mx = 0.5 * (a2x + el.metric(2, bdx));
          const Real my = 0.5 * (a2y + el.metric(3, bdx));
          const Real d2 = 2.0 * basis_->diff(j, be);
          for (int v = 0; v < kVars; ++v) acc_[v](i, j) += d2 * (fs(v, 0) * mx + fs(v, 1) * my);
        }
      }
    if (visc)
      for (int v = 0; v < kVars; ++v)
        acc_[v].noalias() -= basis_->diff * fv1_[v] + fv2_[v] * basis_->diff.transpose();
  }

  for (int f = 0; f < 4; ++f) gather_face(e, f, &SideWork::flux, faceF_[f]);
  if (opts_.form != Form::Weak) {
    // Strong and split forms subtract the element's own normal flux trace
    // from the numerical one; only the jump enters through the faces.
    for (int f = 0; f < 4; ++f) {
      const Real sOut = (f == 0 || f == 2) ? -1.0 : 1.0;
      auto& mats = f < 2 ? f1_ : f2_;
      for (int v = 0; v < kVars; ++v)
        faceF_[f].row(v) -= sOut * face_trace(mats[v], f, *basis_).transpose();
    }
  }

  for (int v = 0; v < kVars; ++v) {
    if (opts_.form == Form::Weak)
      acc_[v].noalias() = basis_->diffHat * f1_[v] + f2_[v] * basis_->diffHat.transpose();
    else if (opts_.form == Form::Strong)
      acc_[v].noalias() = basis_->diff * f1_[v] + f2_[v] * basis_->diff.transpose();
    for (int f = 0; f < 4; ++f)
      scatter_face(acc_[v], Vector(faceF_[f].row(v).transpose()), f, *basis_);
    auto out = dudt.var(e, v);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) out(i, j) = -acc_[v](i, j) / el.jac[j * n + i];
  }
}

template <class System>
void SpatialOperator<System>::rhs(const StateVector& u, Real t, StateVector& dudt) {
  if (u.n_elements() != mesh_->n_elements() || u.n_vars() != kVars || u.nodes_per_dir() != n_)
    throw DgError("state shape does not match the operator");
  if (dudt.n_elements() != u.n_elements() || dudt.n_vars() != u.n_vars() ||
      dudt.nodes_per_dir() != u.nodes_per_dir())
    throw DgError("dudt shape does not match the state");
  if (anyFv_) fv_compute_means(u);
  compute_traces(u, t);
  if (eq_.viscous()) compute_gradients(u, t);
  if (anyFv_) fv_reconstruct(t);
  compute_side_fluxes(t);
  for (Index e = 0; e < mesh_->n_elements(); ++e) {
    if (kind_[e] == ElementKind::Dg)
      accumulate_element(e, u, dudt);
    else
      fv_element_update(e, dudt);
  }
}

template class SpatialOperator<ScalarAdvectionDiffusion>;
template class SpatialOperator<CompressibleFlow>;

}  // namespace dgflux
