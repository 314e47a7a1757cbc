#include "mhdk/postproc.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace mhdk {

namespace {

void require(const FieldFunction& f, SpaceFamily family, const char* what) {
  if (f.dofmap == nullptr) throw InvalidArgument(std::string(what) + ": field has no space");
  if (f.dofmap->family() != family) {
    throw InvalidArgument(std::string(what) + ": expected a " + std::string(to_string(family)) + " field");
  }
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

double error_norm(const FieldFunction& field, const VectorField& exact, NormKind kind, const VectorField* exact_curl) {
  if (field.dofmap == nullptr) throw InvalidArgument("error_norm: field has no space");
  const SpaceFamily fam = field.dofmap->family();
  if (fam != SpaceFamily::HdivLinear && fam != SpaceFamily::HcurlNedelec2Deg1) {
    throw InvalidArgument("error_norm: vector exact solution for a scalar space");
  }
  if (kind == NormKind::HcurlFull) {
    if (fam != SpaceFamily::HcurlNedelec2Deg1) throw InvalidArgument("error_norm: H(curl) norm needs a C_h field");
    if (exact_curl == nullptr || !*exact_curl) throw InvalidArgument("error_norm: H(curl) norm needs the exact curl");
  }
  const Mesh& mesh = field.dofmap->mesh();
  const QuadratureRule& rule = default_tet_rule();
  double sum = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const Vec3 curl_h = kind == NormKind::HcurlFull ? field.curl(c) : Vec3::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = g.map(rule.points[q]);
      const double wq = rule.weights[q] * g.det;
      sum += wq * (exact(x) - field.vector_value(c, rule.points[q])).squaredNorm();
      if (kind == NormKind::HcurlFull) sum += wq * ((*exact_curl)(x) - curl_h).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double error_norm(const FieldFunction& field, const ScalarField& exact) {
  if (field.dofmap == nullptr) throw InvalidArgument("error_norm: field has no space");
  const SpaceFamily fam = field.dofmap->family();
  if (fam != SpaceFamily::L2Constant && fam != SpaceFamily::H1P2) {
    throw InvalidArgument("error_norm: scalar exact solution for a vector space");
  }
  const Mesh& mesh = field.dofmap->mesh();
  const QuadratureRule& rule = default_tet_rule();
  double sum = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double d = exact(g.map(rule.points[q])) - field.scalar_value(c, rule.points[q]);
      sum += rule.weights[q] * g.det * d * d;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const FieldFunction& field) {
  if (field.dofmap == nullptr) throw InvalidArgument("l2_norm: field has no space");
  const SpaceFamily fam = field.dofmap->family();
  if (fam == SpaceFamily::L2Constant || fam == SpaceFamily::H1P2) {
    return error_norm(field, ScalarField([](const Vec3&) { return 0.0; }));
  }
  return error_norm(field, VectorField([](const Vec3&) { return Vec3::Zero().eval(); }));
}

double div_norm(const FieldFunction& j_h) {
  require(j_h, SpaceFamily::HdivLinear, "div_norm");
  const Mesh& mesh = j_h.dofmap->mesh();
  double sum = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const double d = j_h.divergence(c);
    sum += d * d * mesh.cell_volume(c);
  }
  return std::sqrt(sum);
}

std::vector<Vec3> recover_B(const FieldFunction& a_h) {
  require(a_h, SpaceFamily::HcurlNedelec2Deg1, "recover_B");
  const Mesh& mesh = a_h.dofmap->mesh();
  std::vector<Vec3> b(static_cast<std::size_t>(mesh.num_cells()));
  for (Index c = 0; c < mesh.num_cells(); ++c) b[c] = a_h.curl(c);
  return b;
}

double b_div_check(const Mesh& mesh, const std::vector<Vec3>& b_cells) {
  if (static_cast<Index>(b_cells.size()) != mesh.num_cells()) {
    throw InvalidArgument("b_div_check: one value per cell expected");
  }
  double worst = 0.0;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const auto& fc = mesh.face_cells(f);
    if (fc[1] < 0) continue;
    const Vec3 n = mesh.face_normal(f);
    worst = std::max(worst, std::abs((b_cells[fc[0]] - b_cells[fc[1]]).dot(n)));
  }
  return worst;
}

VectorField recover_E(const FieldFunction& j_h, const FieldFunction& a_h, const ProblemSpec& problem) {
  require(j_h, SpaceFamily::HdivLinear, "recover_E");
  require(a_h, SpaceFamily::HcurlNedelec2Deg1, "recover_E");
  const double eta = problem.eta();
  const VectorField w = problem.w;
  return [&j_h, &a_h, eta, w](const Vec3& x) -> Vec3 {
    const auto [cell, ref] = j_h.dofmap->mesh().locate(x);
    Vec3 e = eta * j_h.vector_value(cell, ref);
    if (w) e -= w(x).cross(a_h.curl(cell));
    return e;
  };
}

ImprovedPotential improve_phi(const FieldFunction& a_h, const ProblemSpec& problem, const DofMap& p2_space,
                              double rel_tol) {
  require(a_h, SpaceFamily::HcurlNedelec2Deg1, "improve_phi");
  if (p2_space.family() != SpaceFamily::H1P2) throw InvalidArgument("improve_phi: P2 space expected");
  if (&p2_space.mesh() != &a_h.dofmap->mesh()) throw InvalidArgument("improve_phi: spaces on different meshes");
  const Mesh& mesh = p2_space.mesh();
  const QuadratureRule& rule = default_tet_rule();
  const auto& basis = reference_p2_basis();

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_cells()) * 100);
  Vector rhs = Vector::Zero(p2_space.total_dofs());
  std::array<Vec3, 10> grads;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto dofs = p2_space.cell_dofs(c);
    const Vec3 b = a_h.curl(c);
    Eigen::Matrix<double, 10, 10> local = Eigen::Matrix<double, 10, 10>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = g.map(rule.points[q]);
      const double wq = rule.weights[q] * g.det;
      Vec3 src = problem.f ? problem.f(x) : Vec3::Zero();
      if (problem.w) src += problem.w(x).cross(b);
      for (int i = 0; i < 10; ++i) grads[i] = g.inverse_transpose * basis[i].gradient(rule.points[q]);
      for (int i = 0; i < 10; ++i) {
        rhs[dofs[i].global] += wq * src.dot(grads[i]);
        for (int j = 0; j < 10; ++j) local(i, j) += wq * grads[i].dot(grads[j]);
      }
    }
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) trip.push_back({dofs[i].global, dofs[j].global, local(i, j)});
    }
  }
  CsrMatrix lap = CsrMatrix::from_triplets(p2_space.total_dofs(), p2_space.total_dofs(), std::move(trip));

  std::vector<char> mask(static_cast<std::size_t>(p2_space.total_dofs()), 0);
  for (Index i = 0; i < p2_space.total_dofs(); ++i) mask[i] = p2_space.is_constrained(i) ? 1 : 0;
  lap.zero_columns(mask);
  for (Index i = 0; i < p2_space.total_dofs(); ++i) {
    if (!mask[i]) continue;
    lap.zero_row(i);
    lap.set_diagonal(i, 1.0);
    rhs[i] = 0.0;
  }

  ImprovedPotential out;
  Vector x = Vector::Zero(rhs.size());
  const SolverReport rep = cg_solve(lap, rhs, x, CgPreconditioner::SymmetricGaussSeidel, rel_tol, 20000);
  if (!rep.converged) throw NumericalError("improve_phi: CG did not converge");
  const double bn = rhs.norm();
  out.relative_residual = bn > 0.0 ? (rhs - spmv(lap, x)).norm() / bn : 0.0;
  out.iterations = rep.iterations;
  out.converged = rep.converged;
  out.phi = FieldFunction(p2_space, std::move(x));
  return out;
}

double EnergyBalance::defect1() const { return relative_gap(lhs1, rhs1); }
double EnergyBalance::defect2() const { return relative_gap(lhs2, rhs2); }

EnergyBalance energy_check(const MhdSolution& sol, const ProblemSpec& problem, const MixedSpaces& spaces) {
  require(sol.J, SpaceFamily::HdivLinear, "energy_check");
  require(sol.A, SpaceFamily::HcurlNedelec2Deg1, "energy_check");
  const Mesh& mesh = spaces.D.mesh();
  const QuadratureRule& rule = default_tet_rule();
  const double eta = problem.eta();
  const double nu = problem.nu_m();
  EnergyBalance e;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const Vec3 b = sol.A.curl(c);
    e.lhs2 += nu * b.squaredNorm() * g.det / 6.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& ref = rule.points[q];
      const Vec3 x = g.map(ref);
      const double wq = rule.weights[q] * g.det;
      const Vec3 j = sol.J.vector_value(c, ref);
      const Vec3 a = sol.A.vector_value(c, ref);
      e.lhs1 += wq * eta * j.squaredNorm();
      if (problem.f) e.rhs1 += wq * problem.f(x).dot(j);
      if (problem.w) e.rhs1 -= wq * j.cross(b).dot(problem.w(x));
      if (problem.g) e.rhs2 += wq * problem.g(x).dot(a);
      e.rhs2 += wq * j.dot(a);
    }
  }

  // Boundary work of phi_w: the J part of the load with f = 0.
  if (problem.phi_w) {
    ProblemSpec boundary_only;
    boundary_only.phi_w = problem.phi_w;
    const Vector load = assemble_rhs(boundary_only, spaces);
    e.rhs1 += make_partition(spaces).segment(load, kJ).dot(sol.J.coefficients);
  }

  // Work of the reaction on prescribed A DOFs: A_k times the residual of the
  // unconstrained A row k.
  bool nonzero_data = false;
  for (Index k : spaces.C.constrained_list()) nonzero_data = nonzero_data || sol.A.coefficients[k] != 0.0;
  if (nonzero_data) {
    const CsrMatrix x_blk = assemble_block(BlockId::X, spaces, problem.sigma, problem.rm);
    const CsrMatrix f_blk = assemble_block(BlockId::F, spaces, problem.sigma, problem.rm);
    const CsrMatrix b_blk = assemble_block(BlockId::B, spaces, problem.sigma, problem.rm);
    const Vector load = make_partition(spaces).segment(assemble_rhs(problem, spaces), kA);
    Vector res = -load;
    spmv_add(x_blk, sol.J.coefficients, 1.0, res);
    spmv_add(f_blk, sol.A.coefficients, 1.0, res);
    spmv_transpose_add(b_blk, sol.r.coefficients, 1.0, res);
    for (Index k : spaces.C.constrained_list()) e.rhs2 += sol.A.coefficients[k] * res[k];
  }
  return e;
}

void convergence_order(std::vector<ConvergenceRow>& rows) {
  auto order = [](double prev, double cur) -> std::optional<double> {
    if (!(prev > 0.0) || !(cur > 0.0)) return std::nullopt;
    return std::log2(prev / cur);
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ConvergenceRow& r = rows[k];
    if (k == 0) {
      r.ord_J = r.ord_phi = r.ord_Acurl = r.ord_AL2 = std::nullopt;
      continue;
    }
    const ConvergenceRow& p = rows[k - 1];
    r.ord_J = order(p.e_J, r.e_J);
    r.ord_phi = order(p.e_phi, r.e_phi);
    r.ord_Acurl = order(p.e_Acurl, r.e_Acurl);
    r.ord_AL2 = order(p.e_AL2, r.e_AL2);
  }
}

nlohmann::json to_json(const ConvergenceRow& row) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"n", row.n},
          {"h", row.h},
          {"e_J", row.e_J},
          {"ord_J", opt(row.ord_J)},
          {"e_phi", row.e_phi},
          {"ord_phi", opt(row.ord_phi)},
          {"e_Acurl", row.e_Acurl},
          {"ord_Acurl", opt(row.ord_Acurl)},
          {"e_AL2", row.e_AL2},
          {"ord_AL2", opt(row.ord_AL2)},
          {"divJ", row.divJ},
          {"iterations", row.iterations},
          {"converged", row.converged}};
}

}  // namespace mhdk
