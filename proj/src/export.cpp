#include "dgflux/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dgflux/fv_subcell.hpp"

namespace dgflux {

namespace {

std::vector<std::string> var_names(int nVars) {
  if (nVars == 1) return {"u"};
  return {"rho", "mom_x", "mom_y", "energy"};
}

Vector equispaced(Index count) {
  Vector pts(count);
  for (Index i = 0; i < count; ++i)
    pts[i] = -1.0 + 2.0 * static_cast<Real>(i) / static_cast<Real>(count - 1);
  return pts;
}

std::string csv_sibling(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ".csv";
  return path.substr(0, dot) + ".csv";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("short write: " + path);
}

std::string format_value(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// one output point: position, the conserved fields, the derived fields
struct Sample {
  Real x = 0, y = 0;
  std::vector<Real> values;
};

template <class System>
Real derived_value(const System& eq, const std::string& name, const Vector& state,
                   Real omega) {
  if constexpr (System::kVars == 4) {
    typename System::State u;
    u << state[0], state[1], state[2], state[3];
    if (name == "p") return pressure(eq, u);
    if (name == "s") {
      const Real p = pressure(eq, u);
      return std::log(p) - eq.gamma * std::log(u[0]);
    }
    return omega;
  } else {
    (void)eq;
    (void)state;
    return omega;
  }
}

}  // namespace

template <class System>
void export_visualization(SpatialOperator<System>& op, const StateVector& u, Real t,
                          int nVis, const std::string& path,
                          const std::vector<std::string>& derived) {
  if (nVis < 1) throw ConfigError("nvis must be at least 1");
  bool wantOmega = false;
  for (const auto& name : derived) {
    if (name != "p" && name != "s" && name != "omega")
      throw ConfigError("unknown derived quantity '" + name + "'; known: p, s, omega");
    if (System::kVars != 4)
      throw ConfigError("derived quantity '" + name + "' needs the flow system");
    if (name == "omega") wantOmega = true;
  }
  if (wantOmega) op.lift_gradients(u, t);

  const Mesh& mesh = op.mesh();
  const NodalBasis& basis = op.basis();
  const System& eq = op.equations();
  const Index n = basis.count();
  const int nVars = System::kVars;

  const Vector visPts = equispaced(nVis + 1);
  const Matrix visInterp = build_interpolation_matrix(basis.nodes, visPts);
  // subcell boundaries and centers for the piecewise-constant FV patches
  const Vector fvBounds = equispaced(n + 1);
  Vector fvCenters(n);
  for (Index k = 0; k < n; ++k) fvCenters[k] = 0.5 * (fvBounds[k] + fvBounds[k + 1]);
  const Matrix fvInterp = build_interpolation_matrix(basis.nodes, fvCenters);

  std::vector<Sample> points;
  std::vector<int> pointKind;
  std::vector<std::array<Index, 4>> quads;
  std::vector<int> cellKind;

  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const bool fv = op.element_kinds()[e] == ElementKind::Fv;
    const Eigen::Map<const Matrix> jNodal(el.jac.data(), n, n);

    Matrix omega;  // nodal vorticity polynomial, when requested
    if (wantOmega && nVars == 4) omega = op.grad_x(e, 1) - op.grad_y(e, 0);

    if (!fv) {
      const Matrix pos = map_eval(el, mesh.ngeo, visPts, visPts);
      std::vector<Matrix> fields(nVars);
      for (int v = 0; v < nVars; ++v)
        fields[v] = visInterp * u.var(e, v).eval() * visInterp.transpose();
      Matrix omegaVis;
      if (wantOmega) omegaVis = visInterp * omega * visInterp.transpose();

      const Index base = static_cast<Index>(points.size());
      const Index m = nVis + 1;
      for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < m; ++i) {
          Sample s;
          s.x = pos(0, j * m + i);
          s.y = pos(1, j * m + i);
          Vector state(nVars);
          for (int v = 0; v < nVars; ++v) {
            s.values.push_back(fields[v](i, j));
            state[v] = fields[v](i, j);
          }
          for (const auto& name : derived)
            s.values.push_back(
                derived_value(eq, name, state, wantOmega ? omegaVis(i, j) : 0.0));
          points.push_back(std::move(s));
          pointKind.push_back(0);
        }
      for (Index j = 0; j < nVis; ++j)
        for (Index i = 0; i < nVis; ++i) {
          quads.push_back({base + j * m + i, base + j * m + i + 1,
                           base + (j + 1) * m + i + 1, base + (j + 1) * m + i});
          cellKind.push_back(0);
        }
    } else {
      const Matrix corners = map_eval(el, mesh.ngeo, fvBounds, fvBounds);
      const Matrix& jbar = op.subcell_geometry(e).jbar;
      std::vector<Matrix> means(nVars);
      for (int v = 0; v < nVars; ++v)
        means[v] = dg_to_fv(op.fv_vandermonde(), u.var(e, v), jNodal, jbar);
      Matrix omegaCenters;
      if (wantOmega) omegaCenters = fvInterp * omega * fvInterp.transpose();

      const Index m = n + 1;
      for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k) {
          Vector state(nVars);
          std::vector<Real> vals;
          for (int v = 0; v < nVars; ++v) {
            vals.push_back(means[v](k, l));
            state[v] = means[v](k, l);
          }
          for (const auto& name : derived)
            vals.push_back(derived_value(eq, name, state,
                                         wantOmega ? omegaCenters(k, l) : 0.0));
          const Index base = static_cast<Index>(points.size());
          const std::array<std::pair<Index, Index>, 4> cornerIdx{
              {{k, l}, {k + 1, l}, {k + 1, l + 1}, {k, l + 1}}};
          for (const auto& [ci, cj] : cornerIdx) {
            Sample s;
            s.x = corners(0, cj * m + ci);
            s.y = corners(1, cj * m + ci);
            s.values = vals;
            points.push_back(std::move(s));
            pointKind.push_back(1);
          }
          quads.push_back({base, base + 1, base + 2, base + 3});
          cellKind.push_back(1);
        }
    }
  }

  std::vector<std::string> columns = var_names(nVars);
  for (const auto& name : derived) columns.push_back(name);

  std::ostringstream vtk;
  vtk << "# vtk DataFile Version 3.0\n";
  vtk << "dgflux solution at t = " << format_value(t) << "\n";
  vtk << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  vtk << "POINTS " << points.size() << " double\n";
  for (const Sample& s : points)
    vtk << format_value(s.x) << " " << format_value(s.y) << " 0\n";
  vtk << "CELLS " << quads.size() << " " << 5 * quads.size() << "\n";
  for (const auto& q : quads)
    vtk << "4 " << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << "\n";
  vtk << "CELL_TYPES " << quads.size() << "\n";
  for (std::size_t c = 0; c < quads.size(); ++c) vtk << "9\n";
  vtk << "POINT_DATA " << points.size() << "\n";
  for (std::size_t col = 0; col < columns.size(); ++col) {
    vtk << "SCALARS " << columns[col] << " double 1\nLOOKUP_TABLE default\n";
    for (const Sample& s : points) vtk << format_value(s.values[col]) << "\n";
  }
  vtk << "CELL_DATA " << quads.size() << "\n";
  vtk << "SCALARS element_kind int 1\nLOOKUP_TABLE default\n";
  for (int k : cellKind) vtk << k << "\n";
  write_text(path, vtk.str());

  std::ostringstream csv;
  csv << "x,y";
  for (const auto& c : columns) csv << "," << c;
  csv << ",element_kind\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Sample& s = points[p];
    csv << format_value(s.x) << "," << format_value(s.y);
    for (Real v : s.values) csv << "," << format_value(v);
    csv << "," << pointKind[p] << "\n";
  }
  write_text(csv_sibling(path), csv.str());
}

template void export_visualization<ScalarAdvectionDiffusion>(
    SpatialOperator<ScalarAdvectionDiffusion>&, const StateVector&, Real, int,
    const std::string&, const std::vector<std::string>&);
template void export_visualization<CompressibleFlow>(
    SpatialOperator<CompressibleFlow>&, const StateVector&, Real, int, const std::string&,
    const std::vector<std::string>&);

}  // namespace dgflux
