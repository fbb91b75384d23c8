#include "dgflux/fv_subcell.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace dgflux {

Real minmod(Real a, Real b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

Real limited_slope(SlopeLimiter limiter, Real left, Real right) {
  switch (limiter) {
    case SlopeLimiter::Minmod:
      return minmod(left, right);
    case SlopeLimiter::Central:
      return 0.5 * (left + right);
    default:
      return 0.0;
  }
}

Matrix dg_to_fv(const FvVandermonde& fvv, const Eigen::Ref<const Matrix>& nodal,
                const Eigen::Ref<const Matrix>& jNodal, const Matrix& jbar) {
  return (fvv.dgToFv * nodal.cwiseProduct(jNodal) * fvv.dgToFv.transpose()).cwiseQuotient(jbar);
}

Matrix fv_to_dg(const FvVandermonde& fvv, const Eigen::Ref<const Matrix>& means,
                const Eigen::Ref<const Matrix>& jNodal, const Matrix& jbar) {
  return (fvv.fvToDg * means.cwiseProduct(jbar) * fvv.fvToDg.transpose()).cwiseQuotient(jNodal);
}

SubcellGeometry build_subcell_geometry(const NodalBasis& basis, const FvVandermonde& fvv,
                                       const Element& elem) {
  const Index n = basis.count();
  const Real w = fvv.subcellWidth;
  SubcellGeometry g;

  const Eigen::Map<const Matrix> jm(elem.jac.data(), n, n);
  g.jbar = fvv.dgToFv * jm * fvv.dgToFv.transpose();

  Matrix a1x(n, n), a1y(n, n), a2x(n, n), a2y(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Index idx = j * n + i;
      a1x(i, j) = elem.metric(0, idx);
      a1y(i, j) = elem.metric(1, idx);
      a2x(i, j) = elem.metric(2, idx);
      a2y(i, j) = elem.metric(3, idx);
    }

  if (n < 2) {
    g.inner1x.resize(0, n);
    g.inner1y.resize(0, n);
    g.inner2x.resize(n, 0);
    g.inner2y.resize(n, 0);
    return g;
  }
  Vector inner(n - 1);
  for (Index k = 0; k + 1 < n; ++k) inner[k] = -1.0 + static_cast<Real>(k + 1) * w;
  const Matrix lineEval = build_interpolation_matrix(basis.nodes, inner);

  // integral over a face piece = w times the subcell mean along the face
  g.inner1x = w * (lineEval * a1x * fvv.dgToFv.transpose());
  g.inner1y = w * (lineEval * a1y * fvv.dgToFv.transpose());
  g.inner2x = w * (fvv.dgToFv * a2x * lineEval.transpose());
  g.inner2y = w * (fvv.dgToFv * a2y * lineEval.transpose());
  return g;
}

template <class System>
const SubcellGeometry& SpatialOperator<System>::subcell_geometry(Index elem) {
  auto it = fvGeom_.find(elem);
  if (it == fvGeom_.end())
    it = fvGeom_.emplace(elem, build_subcell_geometry(*basis_, fvv_, mesh_->elements[elem])).first;
  return it->second;
}

template <class System>
void SpatialOperator<System>::fv_compute_means(const StateVector& u) {
  for (Index e = 0; e < mesh_->n_elements(); ++e) {
    if (kind_[e] != ElementKind::Fv) continue;
    const SubcellGeometry& geom = subcell_geometry(e);
    const Eigen::Map<const Matrix> jm(mesh_->elements[e].jac.data(), n_, n_);
    for (int v = 0; v < kVars; ++v)
      means_[e * kVars + v] = dg_to_fv(fvv_, u.var(e, v), jm, geom.jbar);
  }
}

template <class System>
Matrix SpatialOperator<System>::fv_adjacent_means(Index e, int f) const {
  Matrix out(kVars, n_);
  for (int v = 0; v < kVars; ++v) {
    const Matrix& m = means_[e * kVars + v];
    switch (f) {
      case 0:
        out.row(v) = m.row(0);
        break;
      case 1:
        out.row(v) = m.row(n_ - 1);
        break;
      case 2:
        out.row(v) = m.col(0).transpose();
        break;
      default:
        out.row(v) = m.col(n_ - 1).transpose();
        break;
    }
  }
  return out;
}

template <class System>
Matrix SpatialOperator<System>::fv_neighbor_means(Index e, int f) const {
  const Index sid = mesh_->elements[e].sideIds[f];
  const Side& s = mesh_->sides[sid];
  const SideWork& w = side_[sid];
  Matrix out;
  if (s.master == e && s.masterFace == f) {
    out = w.fvp;
  } else if (s.flip) {
    out = w.fvm.rowwise().reverse();
  } else {
    out = w.fvm;
  }
  return out;
}

template <class System>
Matrix SpatialOperator<System>::fv_face_values(Index e, int f) const {
  Matrix out(kVars, n_);
  const Real h = 0.5 * fvv_.subcellWidth;
  for (Index k = 0; k < n_; ++k) {
    State wf;
    for (int v = 0; v < kVars; ++v) {
      const Index idx = e * kVars + v;
      switch (f) {
        case 0:
          wf[v] = prim_[idx](0, k) - h * slopeX_[idx](0, k);
          break;
        case 1:
          wf[v] = prim_[idx](n_ - 1, k) + h * slopeX_[idx](n_ - 1, k);
          break;
        case 2:
          wf[v] = prim_[idx](k, 0) - h * slopeY_[idx](k, 0);
          break;
        default:
          wf[v] = prim_[idx](k, n_ - 1) + h * slopeY_[idx](k, n_ - 1);
          break;
      }
    }
    try {
      out.col(k) = prim_to_cons(eq_, wf);
    } catch (const NonPhysicalState&) {
      std::ostringstream msg;
      msg << "subcell reconstruction left the physical state space in element " << e
          << ", face " << f << ", face subcell " << k;
      throw NonPhysicalState(msg.str());
    }
  }
  return out;
}

template <class System>
void SpatialOperator<System>::fv_reconstruct(Real t) {
  const auto& sides = mesh_->sides;
  // Exchange payloads first: FV elements expose their face-adjacent subcell
  // means, DG elements the subcell means of their trace, boundaries a ghost
  // built from the subcell-averaged face geometry.
  for (Index sid = 0; sid < mesh_->n_sides(); ++sid) {
    const Side& s = sides[sid];
    SideWork& w = side_[sid];
    if (!w.fvActive) continue;
    if (kind_[s.master] == ElementKind::Fv) {
      w.fvm = fv_adjacent_means(s.master, s.masterFace);
    } else {
      for (int v = 0; v < kVars; ++v)
        w.fvm.row(v) = (fvv_.dgToFv * w.um.row(v).transpose()).transpose();
    }
    if (s.is_boundary()) {
      const BcKind kind = bcKindBySide_[sid];
      const Matrix xm = fvv_.dgToFv * s.xFace.transpose();
      const Matrix nm =
          fvv_.dgToFv *
          (s.normal.array().rowwise() * s.surf.transpose().array()).matrix().transpose();
      for (Index k = 0; k < n_; ++k) {
        Vector2 nu = nm.row(k).transpose();
        nu /= nu.norm();
        w.fvp.col(k) =
            ghost_state(kind, State(w.fvm.col(k)), nu, Vector2(xm.row(k).transpose()), t);
      }
    } else if (kind_[s.slave] == ElementKind::Fv) {
      const Matrix sl = fv_adjacent_means(s.slave, s.slaveFace);
      if (s.flip)
        w.fvp = sl.rowwise().reverse();
      else
        w.fvp = sl;
    } else {
      for (int v = 0; v < kVars; ++v)
        w.fvp.row(v) = (fvv_.dgToFv * w.up.row(v).transpose()).transpose();
    }
  }

  // Primitive means and limited slopes on the uniform reference spacing.
  const Real w = fvv_.subcellWidth;
  for (Index e = 0; e < mesh_->n_elements(); ++e) {
    if (kind_[e] != ElementKind::Fv) continue;
    for (Index j = 0; j < n_; ++j)
      for (Index i = 0; i < n_; ++i) {
        State ub;
        for (int v = 0; v < kVars; ++v) ub[v] = means_[e * kVars + v](i, j);
        const State wb = cons_to_prim(eq_, ub);
        for (int v = 0; v < kVars; ++v) prim_[e * kVars + v](i, j) = wb[v];
      }
    std::array<Matrix, 4> nb;
    for (int f = 0; f < 4; ++f) {
      nb[f] = fv_neighbor_means(e, f);
      for (Index k = 0; k < n_; ++k) nb[f].col(k) = cons_to_prim(eq_, State(nb[f].col(k)));
    }
    for (int v = 0; v < kVars; ++v) {
      const Index idx = e * kVars + v;
      const Matrix& P = prim_[idx];
      for (Index j = 0; j < n_; ++j)
        for (Index i = 0; i < n_; ++i) {
          const Real dl = i > 0 ? (P(i, j) - P(i - 1, j)) / w : (P(0, j) - nb[0](v, j)) / w;
          const Real dr =
              i + 1 < n_ ? (P(i + 1, j) - P(i, j)) / w : (nb[1](v, j) - P(n_ - 1, j)) / w;
          slopeX_[idx](i, j) = limited_slope(opts_.limiter, dl, dr);
          const Real bl = j > 0 ? (P(i, j) - P(i, j - 1)) / w : (P(i, 0) - nb[2](v, i)) / w;
          const Real br =
              j + 1 < n_ ? (P(i, j + 1) - P(i, j)) / w : (nb[3](v, i) - P(i, n_ - 1)) / w;
          slopeY_[idx](i, j) = limited_slope(opts_.limiter, bl, br);
        }
    }
  }
}

template <class System>
void SpatialOperator<System>::fv_side_flux(Index sid, Real t) {
  const Side& s = mesh_->sides[sid];
  SideWork& w = side_[sid];
  const Real sw = fvv_.subcellWidth;
  // integrated outward normal of each face subcell, master orientation
  const Matrix nm =
      sw * (fvv_.dgToFv *
            (s.normal.array().rowwise() * s.surf.transpose().array()).matrix().transpose());

  Matrix ua(kVars, n_), ub(kVars, n_);
  if (kind_[s.master] == ElementKind::Fv)
    ua = fv_face_values(s.master, s.masterFace);
  else
    ua = w.fvm;  // flux states of a DG neighbor live at the face subcells too
  if (s.is_boundary()) {
    const BcKind kind = bcKindBySide_[sid];
    const Matrix xm = fvv_.dgToFv * s.xFace.transpose();
    for (Index k = 0; k < n_; ++k) {
      Vector2 nu = nm.row(k).transpose();
      nu /= nu.norm();
      ub.col(k) = ghost_state(kind, State(ua.col(k)), nu, Vector2(xm.row(k).transpose()), t);
    }
  } else if (kind_[s.slave] == ElementKind::Fv) {
    const Matrix sl = fv_face_values(s.slave, s.slaveFace);
    if (s.flip)
      ub = sl.rowwise().reverse();
    else
      ub = sl;
  } else {
    ub = w.fvp;
  }

  const bool swp = s.swapRoles && !s.is_boundary();
  for (Index k = 0; k < n_; ++k) {
    Vector2 nu = nm.row(k).transpose();
    const Real len = nu.norm();
    nu /= len;
    State a = ua.col(k);
    State b = ub.col(k);
    if (swp) {
      std::swap(a, b);
      nu = -nu;
    }
    const State f = riemann_flux(eq_, opts_.solver, opts_.twoPoint, a, b, nu);
    const Real scale = swp ? -len : len;
    w.fluxFv.col(k) = scale * f;
  }
  // nodal view for a DG neighbor: the polynomial whose subcell means match
  // the integrated flux density, so both sides remove identical totals
  for (int v = 0; v < kVars; ++v)
    w.flux.row(v) = (fvv_.fvToDg * (w.fluxFv.row(v).transpose() / sw)).transpose();
}

template <class System>
void SpatialOperator<System>::fv_element_update(Index e, StateVector& dudt) {
  const SubcellGeometry& geom = subcell_geometry(e);
  const Element& el = mesh_->elements[e];
  const Real w = fvv_.subcellWidth;
  const Real h = 0.5 * w;

  auto consAt = [&](Index i, Index j, int dir, Real sgn) -> State {
    State wf;
    for (int v = 0; v < kVars; ++v) {
      const Index idx = e * kVars + v;
      const Real sl = dir == 0 ? slopeX_[idx](i, j) : slopeY_[idx](i, j);
      wf[v] = prim_[idx](i, j) + sgn * h * sl;
    }
    try {
      return prim_to_cons(eq_, wf);
    } catch (const NonPhysicalState&) {
      std::ostringstream msg;
      msg << "subcell reconstruction left the physical state space in element " << e
          << " at subcell (" << i << ", " << j << ")";
      throw NonPhysicalState(msg.str());
    }
  };

  // net outflow per subcell
  for (int v = 0; v < kVars; ++v) acc_[v].setZero();
  for (Index j = 0; j < n_; ++j)
    for (Index r = 0; r + 1 < n_; ++r) {
      Vector2 nu(geom.inner1x(r, j), geom.inner1y(r, j));
      const Real len = nu.norm();
      nu /= len;
      const State a = consAt(r, j, 0, 1.0);
      const State b = consAt(r + 1, j, 0, -1.0);
      const State f = riemann_flux(eq_, opts_.solver, opts_.twoPoint, a, b, nu);
      for (int v = 0; v < kVars; ++v) {
        acc_[v](r, j) += len * f[v];
        acc_[v](r + 1, j) -= len * f[v];
      }
    }
  for (Index i = 0; i < n_; ++i)
    for (Index r = 0; r + 1 < n_; ++r) {
      Vector2 nu(geom.inner2x(i, r), geom.inner2y(i, r));
      const Real len = nu.norm();
      nu /= len;
      const State a = consAt(i, r, 1, 1.0);
      const State b = consAt(i, r + 1, 1, -1.0);
      const State f = riemann_flux(eq_, opts_.solver, opts_.twoPoint, a, b, nu);
      for (int v = 0; v < kVars; ++v) {
        acc_[v](i, r) += len * f[v];
        acc_[v](i, r + 1) -= len * f[v];
      }
    }
  for (int f = 0; f < 4; ++f) {
    gather_face(e, f, &SideWork::fluxFv, faceF_[f]);
    for (int v = 0; v < kVars; ++v) {
      switch (f) {
        case 0:
          acc_[v].row(0) += faceF_[f].row(v);
          break;
        case 1:
          acc_[v].row(n_ - 1) += faceF_[f].row(v);
          break;
        case 2:
          acc_[v].col(0) += faceF_[f].row(v).transpose();
          break;
        default:
          acc_[v].col(n_ - 1) += faceF_[f].row(v).transpose();
          break;
      }
    }
  }

  // mean rate = -net / (w^2 jbar); mapping the means back to nodal values
  // multiplies by jbar again, so it cancels
  const Eigen::Map<const Matrix> jm(el.jac.data(), n_, n_);
  const Real iw2 = 1.0 / (w * w);
  for (int v = 0; v < kVars; ++v)
    dudt.var(e, v) =
        (-iw2 * (fvv_.fvToDg * acc_[v] * fvv_.fvToDg.transpose())).cwiseQuotient(jm);
}

template <class System>
Real SpatialOperator<System>::indicator_persson(const StateVector& u, Index elem,
                                                const IndicatorConfig& cfg) {
  // FV elements hold the polynomial matching their means, so the same modal
  // transform applies to both kinds
  const Matrix modal = modalInv_ * u.var(elem, 0) * modalInv_.transpose();
  const Index cut = basis_->degree - 1;
  Real etot = 0.0, eshell = 0.0;
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < n_; ++i) {
      const Real m2 = modal(i, j) * modal(i, j);
      etot += m2;
      if (i + j >= cut) eshell += m2;
    }
  if (etot <= 0.0 || eshell <= 0.0) return cfg.floorValue;
  // roundoff leaves smooth fields with shell energy at machine scale; the
  // floor is the lowest reportable value, not just the empty-field answer
  return std::max(cfg.floorValue, std::log10(eshell / etot));
}

template <class System>
Real SpatialOperator<System>::indicator_jameson(const StateVector& u, Index elem) const {
  auto pOf = [this](const State& q) -> Real {
    if constexpr (kVars == 4)
      return pressure(eq_, q);
    else
      return q[0];
  };
  Matrix p(n_, n_);
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < n_; ++i) {
      State q;
      for (int v = 0; v < kVars; ++v) q[v] = u.var(elem, v)(i, j);
      p(i, j) = pOf(q);
    }
  std::array<Vector, 4> outer;
  for (int f = 0; f < 4; ++f) {
    const Index sid = mesh_->elements[elem].sideIds[f];
    const Side& s = mesh_->sides[sid];
    Matrix tr;
    if (s.mortar != MortarRole::None) {
      // elements at a mortar are pinned to DG; sample the own trace so the
      // sensor sees no artificial jump there
      tr = trace_vars(u, elem, f);
    } else if (s.master == elem && s.masterFace == f) {
      tr = side_[sid].up;
    } else if (s.flip) {
      tr = side_[sid].um.rowwise().reverse();
    } else {
      tr = side_[sid].um;
    }
    outer[f].resize(n_);
    for (Index k = 0; k < n_; ++k) outer[f][k] = pOf(State(tr.col(k)));
  }
  Real worst = 0.0;
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < n_; ++i) {
      const Real pl = i > 0 ? p(i - 1, j) : outer[0][j];
      const Real pr = i + 1 < n_ ? p(i + 1, j) : outer[1][j];
      worst = std::max(worst, std::abs(pr - 2.0 * p(i, j) + pl) / (pr + 2.0 * p(i, j) + pl));
      const Real pb = j > 0 ? p(i, j - 1) : outer[2][i];
      const Real pt = j + 1 < n_ ? p(i, j + 1) : outer[3][i];
      worst = std::max(worst, std::abs(pt - 2.0 * p(i, j) + pb) / (pt + 2.0 * p(i, j) + pb));
    }
  return worst;
}

template <class System>
Real SpatialOperator<System>::indicator_value(const StateVector& u, Real t, Index elem,
                                              const IndicatorConfig& cfg) {
  if (cfg.kind == IndicatorKind::PerssonModal) return indicator_persson(u, elem, cfg);
  compute_traces(u, t);
  return indicator_jameson(u, elem);
}

template <class System>
SwitchReport SpatialOperator<System>::update_representation(StateVector& u, Real t,
                                                            const IndicatorConfig& cfg) {
  SwitchReport rep;
  if (cfg.kind == IndicatorKind::JamesonPressure) compute_traces(u, t);
  std::vector<ElementKind> next = kind_;
  std::vector<Index> toProject;
  for (Index e = 0; e < mesh_->n_elements(); ++e) {
    const Real val = cfg.kind == IndicatorKind::PerssonModal ? indicator_persson(u, e, cfg)
                                                             : indicator_jameson(u, e);
    if (val > cfg.upperThreshold && kind_[e] == ElementKind::Dg) {
      bool atMortar = false;
      for (int f = 0; f < 4; ++f)
        if (mesh_->sides[mesh_->elements[e].sideIds[f]].mortar != MortarRole::None)
          atMortar = true;
      if (atMortar) {
        ++rep.keptDgAtMortar;
      } else {
        next[e] = ElementKind::Fv;
        toProject.push_back(e);
        ++rep.toFv;
      }
    } else if (val < cfg.lowerThreshold && kind_[e] == ElementKind::Fv) {
      next[e] = ElementKind::Dg;
      ++rep.toDg;
    }
  }
  set_element_kinds(next);
  // Entering FV discards sub-mean structure: project the nodal data onto the
  // subcell-mean manifold so a later return to DG cannot resurrect the
  // oscillations that triggered the switch.
  for (Index e : toProject) {
    const SubcellGeometry& geom = subcell_geometry(e);
    const Eigen::Map<const Matrix> jm(mesh_->elements[e].jac.data(), n_, n_);
    for (int v = 0; v < kVars; ++v)
      u.var(e, v) = fv_to_dg(fvv_, dg_to_fv(fvv_, u.var(e, v), jm, geom.jbar), jm, geom.jbar);
  }
  rep.fvCount = fv_count();
  return rep;
}

template const SubcellGeometry& SpatialOperator<ScalarAdvectionDiffusion>::subcell_geometry(
    Index);
template void SpatialOperator<ScalarAdvectionDiffusion>::fv_compute_means(const StateVector&);
template void SpatialOperator<ScalarAdvectionDiffusion>::fv_reconstruct(Real);
template void SpatialOperator<ScalarAdvectionDiffusion>::fv_side_flux(Index, Real);
template void SpatialOperator<ScalarAdvectionDiffusion>::fv_element_update(Index, StateVector&);
template Real SpatialOperator<ScalarAdvectionDiffusion>::indicator_value(const StateVector&,
                                                                         Real, Index,
                                                                         const IndicatorConfig&);
template SwitchReport SpatialOperator<ScalarAdvectionDiffusion>::update_representation(
    StateVector&, Real, const IndicatorConfig&);

template const SubcellGeometry& SpatialOperator<CompressibleFlow>::subcell_geometry(Index);
template void SpatialOperator<CompressibleFlow>::fv_compute_means(const StateVector&);
template void SpatialOperator<CompressibleFlow>::fv_reconstruct(Real);
template void SpatialOperator<CompressibleFlow>::fv_side_flux(Index, Real);
template void SpatialOperator<CompressibleFlow>::fv_element_update(Index, StateVector&);
template Real SpatialOperator<CompressibleFlow>::indicator_value(const StateVector&, Real, Index,
                                                                 const IndicatorConfig&);
template SwitchReport SpatialOperator<CompressibleFlow>::update_representation(
    StateVector&, Real, const IndicatorConfig&);

}  // namespace dgflux
