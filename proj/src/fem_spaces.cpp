#include "mhdk/fem_spaces.hpp"

#include <algorithm>
#include <string>

namespace mhdk {

namespace {

const std::array<Vec3, 4>& reference_vertices() {
  static const std::array<Vec3, 4> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  return v;
}

template <class F>
std::array<double, 2> edge_moments_impl(const Vec3& xa, const Vec3& xb, const F& v) {
  const QuadratureRule& rule = default_segment_rule();
  const Vec3 t = xb - xa;
  std::array<double, 2> m{0.0, 0.0};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    const double vt = v(xa + s * t).dot(t);
    m[0] += rule.weights[q] * vt * (1.0 - s);
    m[1] += rule.weights[q] * vt * s;
  }
  return m;
}

template <class F>
std::array<double, 3> face_moments_impl(const Vec3& xa, const Vec3& xb, const Vec3& xc,
                                        const F& v) {
  const QuadratureRule& rule = default_triangle_rule();
  const Vec3 e1 = xb - xa;
  const Vec3 e2 = xc - xa;
  const Vec3 n = e1.cross(e2);
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    const double t = rule.points[q].y();
    const double vn = v(xa + s * e1 + t * e2).dot(n);
    m[0] += rule.weights[q] * vn * (1.0 - s - t);
    m[1] += rule.weights[q] * vn * s;
    m[2] += rule.weights[q] * vn * t;
  }
  return m;
}

LinearVector primal_vector(int m) {
  LinearVector p;
  const int d = m / 4;
  const int t = m % 4;
  if (t == 0) {
    p.constant[d] = 1.0;
  } else {
    p.gradient(d, t - 1) = 1.0;
  }
  return p;
}

// Inverts the DOF matrix of the 12 primal P1 vector functions to obtain the
// nodal basis for the given local functionals.
template <class Functionals>
std::array<LinearVector, 12> nodal_vector_basis(const Functionals& dofs) {
  Eigen::Matrix<double, 12, 12> dof_matrix;
  for (int m = 0; m < 12; ++m) {
    const LinearVector p = primal_vector(m);
    const auto values = dofs(p);
    for (int k = 0; k < 12; ++k) dof_matrix(k, m) = values[k];
  }
  const Eigen::Matrix<double, 12, 12> coeffs = dof_matrix.fullPivLu().inverse();
  std::array<LinearVector, 12> basis;
  for (int i = 0; i < 12; ++i) {
    for (int m = 0; m < 12; ++m) {
      const LinearVector p = primal_vector(m);
      basis[i].constant += coeffs(m, i) * p.constant;
      basis[i].gradient += coeffs(m, i) * p.gradient;
    }
  }
  return basis;
}

double monomial(int m, const Vec3& x) {
  switch (m) {
    case 0: return 1.0;
    case 1: return x.x();
    case 2: return x.y();
    case 3: return x.z();
    case 4: return x.x() * x.x();
    case 5: return x.y() * x.y();
    case 6: return x.z() * x.z();
    case 7: return x.x() * x.y();
    case 8: return x.x() * x.z();
    default: return x.y() * x.z();
  }
}

void require_family(const DofMap& map, SpaceFamily family, const char* what) {
  if (map.family() != family) {
    throw InvalidArgument(std::string(what) + ": requires a " + std::string(to_string(family)) +
                          " space, got " + std::string(to_string(map.family())));
  }
}

}  // namespace

std::string_view to_string(SpaceFamily family) {
  switch (family) {
    case SpaceFamily::HdivLinear: return "HdivLinear";
    case SpaceFamily::L2Constant: return "L2Constant";
    case SpaceFamily::HcurlNedelec2Deg1: return "HcurlNedelec2Deg1";
    case SpaceFamily::H1P2: return "H1P2";
  }
  return "unknown";
}

int dofs_per_cell(SpaceFamily family) {
  switch (family) {
    case SpaceFamily::HdivLinear: return 12;
    case SpaceFamily::L2Constant: return 1;
    case SpaceFamily::HcurlNedelec2Deg1: return 12;
    case SpaceFamily::H1P2: return 10;
  }
  return 0;
}

double Quadratic::operator()(const Vec3& x) const {
  double s = 0.0;
  for (int m = 0; m < 10; ++m) s += c[m] * monomial(m, x);
  return s;
}

Vec3 Quadratic::gradient(const Vec3& x) const {
  return {c[1] + 2.0 * c[4] * x.x() + c[7] * x.y() + c[8] * x.z(),
          c[2] + 2.0 * c[5] * x.y() + c[7] * x.x() + c[9] * x.z(),
          c[3] + 2.0 * c[6] * x.z() + c[8] * x.x() + c[9] * x.y()};
}

const std::array<LinearVector, 12>& reference_hdiv_basis() {
  static const std::array<LinearVector, 12> basis = nodal_vector_basis([](const LinearVector& v) {
    const auto& xv = reference_vertices();
    std::array<double, 12> out{};
    for (int f = 0; f < 4; ++f) {
      const auto& lf = kLocalFaces[f];
      const auto m = face_moments_impl(xv[lf[0]], xv[lf[1]], xv[lf[2]], v);
      for (int p = 0; p < 3; ++p) out[3 * f + p] = m[p];
    }
    return out;
  });
  return basis;
}

const std::array<LinearVector, 12>& reference_hcurl_basis() {
  static const std::array<LinearVector, 12> basis = nodal_vector_basis([](const LinearVector& v) {
    const auto& xv = reference_vertices();
    std::array<double, 12> out{};
    for (int e = 0; e < 6; ++e) {
      const auto& le = kLocalEdges[e];
      const auto m = edge_moments_impl(xv[le[0]], xv[le[1]], v);
      out[2 * e] = m[0];
      out[2 * e + 1] = m[1];
    }
    return out;
  });
  return basis;
}

const std::array<Quadratic, 10>& reference_p2_basis() {
  static const std::array<Quadratic, 10> basis = [] {
    const auto& xv = reference_vertices();
    std::array<Vec3, 10> nodes;
    for (int i = 0; i < 4; ++i) nodes[i] = xv[i];
    for (int e = 0; e < 6; ++e) {
      nodes[4 + e] = 0.5 * (xv[kLocalEdges[e][0]] + xv[kLocalEdges[e][1]]);
    }
    Eigen::Matrix<double, 10, 10> dof_matrix;
    for (int k = 0; k < 10; ++k) {
      for (int m = 0; m < 10; ++m) dof_matrix(k, m) = monomial(m, nodes[k]);
    }
    const Eigen::Matrix<double, 10, 10> coeffs = dof_matrix.fullPivLu().inverse();
    std::array<Quadratic, 10> out;
    for (int i = 0; i < 10; ++i) {
      for (int m = 0; m < 10; ++m) out[i].c[m] = coeffs(m, i);
    }
    return out;
  }();
  return basis;
}

DofMap::DofMap(const Mesh& mesh, SpaceFamily family)
    : mesh_(&mesh), family_(family), per_cell_(mhdk::dofs_per_cell(family)) {
  const Index nc = mesh.num_cells();
  cell_dofs_.resize(static_cast<std::size_t>(nc * per_cell_));
  switch (family) {
    case SpaceFamily::HdivLinear:
      total_ = 3 * mesh.num_faces();
      for (Index c = 0; c < nc; ++c) {
        const auto& faces = mesh.cell_faces(c);
        for (int f = 0; f < 4; ++f) {
          for (int p = 0; p < 3; ++p) {
            cell_dofs_[c * 12 + 3 * f + p] = {3 * faces[f].face + faces[f].slot[p],
                                              double(faces[f].sign)};
          }
        }
      }
      break;
    case SpaceFamily::L2Constant:
      total_ = nc;
      for (Index c = 0; c < nc; ++c) cell_dofs_[c] = {c, 1.0};
      break;
    case SpaceFamily::HcurlNedelec2Deg1:
      total_ = 2 * mesh.num_edges();
      for (Index c = 0; c < nc; ++c) {
        const auto& edges = mesh.cell_edges(c);
        for (int e = 0; e < 6; ++e) {
          const bool same = edges[e].sign > 0;
          for (int p = 0; p < 2; ++p) {
            cell_dofs_[c * 12 + 2 * e + p] = {2 * edges[e].edge + (same ? p : 1 - p),
                                              double(edges[e].sign)};
          }
        }
      }
      break;
    case SpaceFamily::H1P2:
      total_ = mesh.num_vertices() + mesh.num_edges();
      for (Index c = 0; c < nc; ++c) {
        const auto& verts = mesh.cell(c);
        const auto& edges = mesh.cell_edges(c);
        for (int i = 0; i < 4; ++i) cell_dofs_[c * 10 + i] = {verts[i], 1.0};
        for (int e = 0; e < 6; ++e) {
          cell_dofs_[c * 10 + 4 + e] = {mesh.num_vertices() + edges[e].edge, 1.0};
        }
      }
      break;
  }
  constrained_.assign(static_cast<std::size_t>(total_), 0);
  constrained_values_.assign(static_cast<std::size_t>(total_), 0.0);
}

Index DofMap::num_constrained() const {
  return std::count(constrained_.begin(), constrained_.end(), 1);
}

std::vector<Index> DofMap::constrained_list() const {
  std::vector<Index> out;
  for (Index i = 0; i < total_; ++i) {
    if (constrained_[i]) out.push_back(i);
  }
  return out;
}

void DofMap::constrain(Index dof, double value) {
  if (dof < 0 || dof >= total_) throw InvalidArgument("DofMap::constrain: dof out of range");
  constrained_[dof] = 1;
  constrained_values_[dof] = value;
}

DofMap build_space(const Mesh& mesh, SpaceFamily family) { return DofMap(mesh, family); }

BasisEval eval_basis(const DofMap& dofmap, Index cell, const Vec3& ref) {
  const Mesh& mesh = dofmap.mesh();
  if (cell < 0 || cell >= mesh.num_cells()) {
    throw InvalidArgument("eval_basis: cell index out of range");
  }
  constexpr double tol = 1e-12;
  if (ref.minCoeff() < -tol || ref.sum() > 1.0 + tol) {
    throw InvalidArgument("eval_basis: point outside the reference tetrahedron");
  }
  const CellGeometry g = cell_geometry(mesh, cell);
  const auto dofs = dofmap.cell_dofs(cell);
  BasisEval out;
  switch (dofmap.family()) {
    case SpaceFamily::HdivLinear: {
      const auto& basis = reference_hdiv_basis();
      for (int i = 0; i < 12; ++i) {
        const double s = dofs[i].sign;
        out.vectors.push_back(s * g.jacobian * basis[i](ref) / g.det);
        out.divergence.push_back(s * basis[i].divergence() / g.det);
      }
      break;
    }
    case SpaceFamily::HcurlNedelec2Deg1: {
      const auto& basis = reference_hcurl_basis();
      for (int i = 0; i < 12; ++i) {
        const double s = dofs[i].sign;
        out.vectors.push_back(s * g.inverse_transpose * basis[i](ref));
        out.curl.push_back(s * g.jacobian * basis[i].curl() / g.det);
      }
      break;
    }
    case SpaceFamily::H1P2: {
      const auto& basis = reference_p2_basis();
      for (int i = 0; i < 10; ++i) {
        out.scalars.push_back(basis[i](ref));
        out.gradient.push_back(g.inverse_transpose * basis[i].gradient(ref));
      }
      break;
    }
    case SpaceFamily::L2Constant:
      out.scalars.push_back(1.0);
      break;
  }
  return out;
}

FieldFunction::FieldFunction(const DofMap& map, Eigen::VectorXd coeffs)
    : dofmap(&map), coefficients(std::move(coeffs)) {
  if (coefficients.size() != map.total_dofs()) {
    throw InvalidArgument("FieldFunction: coefficient length does not match the DofMap");
  }
}

Vec3 FieldFunction::vector_value(Index cell, const Vec3& ref) const {
  const auto dofs = dofmap->cell_dofs(cell);
  const CellGeometry g = cell_geometry(dofmap->mesh(), cell);
  Vec3 v = Vec3::Zero();
  if (dofmap->family() == SpaceFamily::HdivLinear) {
    const auto& basis = reference_hdiv_basis();
    for (int i = 0; i < 12; ++i) v += dofs[i].sign * coefficients[dofs[i].global] * basis[i](ref);
    return g.jacobian * v / g.det;
  }
  if (dofmap->family() == SpaceFamily::HcurlNedelec2Deg1) {
    const auto& basis = reference_hcurl_basis();
    for (int i = 0; i < 12; ++i) v += dofs[i].sign * coefficients[dofs[i].global] * basis[i](ref);
    return g.inverse_transpose * v;
  }
  throw InvalidArgument("FieldFunction::vector_value: scalar space");
}

double FieldFunction::scalar_value(Index cell, const Vec3& ref) const {
  const auto dofs = dofmap->cell_dofs(cell);
  if (dofmap->family() == SpaceFamily::L2Constant) return coefficients[dofs[0].global];
  if (dofmap->family() == SpaceFamily::H1P2) {
    const auto& basis = reference_p2_basis();
    double s = 0.0;
    for (int i = 0; i < 10; ++i) s += coefficients[dofs[i].global] * basis[i](ref);
    return s;
  }
  throw InvalidArgument("FieldFunction::scalar_value: vector space");
}

double FieldFunction::divergence(Index cell) const {
  require_family(*dofmap, SpaceFamily::HdivLinear, "FieldFunction::divergence");
  const auto dofs = dofmap->cell_dofs(cell);
  const auto& basis = reference_hdiv_basis();
  double d = 0.0;
  for (int i = 0; i < 12; ++i) {
    d += dofs[i].sign * coefficients[dofs[i].global] * basis[i].divergence();
  }
  return d / cell_geometry(dofmap->mesh(), cell).det;
}

Vec3 FieldFunction::curl(Index cell) const {
  require_family(*dofmap, SpaceFamily::HcurlNedelec2Deg1, "FieldFunction::curl");
  const auto dofs = dofmap->cell_dofs(cell);
  const auto& basis = reference_hcurl_basis();
  Vec3 c = Vec3::Zero();
  for (int i = 0; i < 12; ++i) c += dofs[i].sign * coefficients[dofs[i].global] * basis[i].curl();
  const CellGeometry g = cell_geometry(dofmap->mesh(), cell);
  return g.jacobian * c / g.det;
}

Vec3 FieldFunction::gradient(Index cell, const Vec3& ref) const {
  require_family(*dofmap, SpaceFamily::H1P2, "FieldFunction::gradient");
  const auto dofs = dofmap->cell_dofs(cell);
  const auto& basis = reference_p2_basis();
  Vec3 gr = Vec3::Zero();
  for (int i = 0; i < 10; ++i) gr += coefficients[dofs[i].global] * basis[i].gradient(ref);
  return cell_geometry(dofmap->mesh(), cell).inverse_transpose * gr;
}

Vec3 FieldFunction::vector_at(const Vec3& x) const {
  const auto [cell, ref] = dofmap->mesh().locate(x);
  return vector_value(cell, ref);
}

double FieldFunction::scalar_at(const Vec3& x) const {
  const auto [cell, ref] = dofmap->mesh().locate(x);
  return scalar_value(cell, ref);
}

std::array<double, 2> edge_moments(const Mesh& mesh, Index edge, const VectorField& v) {
  const auto& ev = mesh.edge(edge);
  return edge_moments_impl(mesh.vertex(ev[0]), mesh.vertex(ev[1]), v);
}

std::array<double, 3> face_moments(const Mesh& mesh, Index face, const VectorField& v) {
  const auto& fv = mesh.face(face);
  return face_moments_impl(mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]), v);
}

FieldFunction interpolate(const DofMap& dofmap, const VectorField& exact) {
  const Mesh& mesh = dofmap.mesh();
  FieldFunction out(dofmap);
  switch (dofmap.family()) {
    case SpaceFamily::HdivLinear:
      for (Index f = 0; f < mesh.num_faces(); ++f) {
        const auto m = face_moments(mesh, f, exact);
        for (int p = 0; p < 3; ++p) out.coefficients[3 * f + p] = m[p];
      }
      break;
    case SpaceFamily::HcurlNedelec2Deg1:
      for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto m = edge_moments(mesh, e, exact);
        out.coefficients[2 * e] = m[0];
        out.coefficients[2 * e + 1] = m[1];
      }
      break;
    default:
      throw InvalidArgument("interpolate: vector data into a scalar space");
  }
  return out;
}

FieldFunction interpolate(const DofMap& dofmap, const ScalarField& exact) {
  const Mesh& mesh = dofmap.mesh();
  FieldFunction out(dofmap);
  switch (dofmap.family()) {
    case SpaceFamily::L2Constant: {
      const QuadratureRule& rule = default_tet_rule();
      for (Index c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * exact(g.map(rule.points[q]));
        out.coefficients[c] = 6.0 * s;
      }
      break;
    }
    case SpaceFamily::H1P2:
      for (Index v = 0; v < mesh.num_vertices(); ++v) out.coefficients[v] = exact(mesh.vertex(v));
      for (Index e = 0; e < mesh.num_edges(); ++e) {
        const auto& ev = mesh.edge(e);
        out.coefficients[mesh.num_vertices() + e] =
            exact(0.5 * (mesh.vertex(ev[0]) + mesh.vertex(ev[1])));
      }
      break;
    default:
      throw InvalidArgument("interpolate: scalar data into a vector space");
  }
  return out;
}

DofMap constrained_dofs(const DofMap& dofmap, const VectorField& boundary_data) {
  require_family(dofmap, SpaceFamily::HcurlNedelec2Deg1, "constrained_dofs");
  const Mesh& mesh = dofmap.mesh();
  DofMap out = dofmap;
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.boundary_edge(e)) continue;
    const auto m = edge_moments(mesh, e, boundary_data);
    out.constrain(2 * e, m[0]);
    out.constrain(2 * e + 1, m[1]);
  }
  return out;
}

DofMap constrained_dofs(const DofMap& dofmap, const ScalarField& boundary_data) {
  require_family(dofmap, SpaceFamily::H1P2, "constrained_dofs");
  const Mesh& mesh = dofmap.mesh();
  DofMap out = dofmap;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.boundary_vertex(v)) out.constrain(v, boundary_data(mesh.vertex(v)));
  }
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.boundary_edge(e)) continue;
    const auto& ev = mesh.edge(e);
    out.constrain(mesh.num_vertices() + e,
                  boundary_data(0.5 * (mesh.vertex(ev[0]) + mesh.vertex(ev[1]))));
  }
  return out;
}

}  // namespace mhdk
