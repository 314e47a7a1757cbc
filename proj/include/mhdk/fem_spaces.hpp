#pragma once

#include "mhdk/mesh.hpp"
#include "mhdk/quadrature.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace mhdk {

// D_h: H(div)-conforming vector P1 (BDM-type), 3 normal moments per face.
// S_h: piecewise constants.
// C_h: second-family Nedelec edge element of degree 1, 2 tangential moments per edge.
// R_h: continuous P2 Lagrange, vertex values + edge midpoint values.
enum class SpaceFamily { HdivLinear, L2Constant, HcurlNedelec2Deg1, H1P2 };

std::string_view to_string(SpaceFamily family);
int dofs_per_cell(SpaceFamily family);

// Affine vector field c + G x on the reference cell (G(i,j) = d v_i / d x_j).
struct LinearVector {
  Vec3 constant = Vec3::Zero();
  Mat3 gradient = Mat3::Zero();

  Vec3 operator()(const Vec3& x) const { return constant + gradient * x; }
  double divergence() const { return gradient.trace(); }
  Vec3 curl() const {
    return {gradient(2, 1) - gradient(1, 2), gradient(0, 2) - gradient(2, 0),
            gradient(1, 0) - gradient(0, 1)};
  }
};

// Quadratic polynomial in monomials 1,x,y,z,x^2,y^2,z^2,xy,xz,yz.
struct Quadratic {
  std::array<double, 10> c{};

  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
};

// Nodal reference basis of each family, in local DOF order:
//   HdivLinear: local dof 3*f+p, face f opposite vertex f, weight lambda of
//               the p-th face vertex, normal (xb-xa)x(xc-xa).
//   HcurlNedelec2Deg1: local dof 2*e+p, edge e = kLocalEdges[e], weight
//               lambda of endpoint p, tangent x_j - x_i.
//   H1P2: vertices 0..3, then edge midpoints 4..9.
const std::array<LinearVector, 12>& reference_hdiv_basis();
const std::array<LinearVector, 12>& reference_hcurl_basis();
const std::array<Quadratic, 10>& reference_p2_basis();

struct LocalDof {
  Index global = -1;
  double sign = 1.0;
};

// Mapping from cells to global DOFs plus the essential-constraint set. Holds a
// non-owning pointer to the mesh, which must outlive it.
class DofMap {
public:
  DofMap(const Mesh& mesh, SpaceFamily family);

  SpaceFamily family() const { return family_; }
  const Mesh& mesh() const { return *mesh_; }
  Index total_dofs() const { return total_; }
  int dofs_per_cell() const { return per_cell_; }

  std::span<const LocalDof> cell_dofs(Index cell) const {
    return {cell_dofs_.data() + cell * per_cell_, static_cast<std::size_t>(per_cell_)};
  }

  bool is_constrained(Index dof) const { return constrained_[dof] != 0; }
  double constrained_value(Index dof) const { return constrained_values_[dof]; }
  Index num_constrained() const;
  std::vector<Index> constrained_list() const;

  void constrain(Index dof, double value);

private:
  const Mesh* mesh_;
  SpaceFamily family_;
  Index total_ = 0;
  int per_cell_ = 0;
  std::vector<LocalDof> cell_dofs_;
  std::vector<char> constrained_;
  std::vector<double> constrained_values_;
};

DofMap build_space(const Mesh& mesh, SpaceFamily family);

// Mapped basis functions of one cell at one reference point, orientation
// signs applied. Only the arrays relevant to the family are filled:
//   HdivLinear: vectors + divergence; HcurlNedelec2Deg1: vectors + curl;
//   H1P2: scalars + gradient; L2Constant: scalars.
struct BasisEval {
  std::vector<Vec3> vectors;
  std::vector<double> scalars;
  std::vector<double> divergence;
  std::vector<Vec3> curl;
  std::vector<Vec3> gradient;
};

BasisEval eval_basis(const DofMap& dofmap, Index cell, const Vec3& ref_point);

// Coefficient vector over a DofMap. Holds a non-owning pointer.
struct FieldFunction {
  const DofMap* dofmap = nullptr;
  Eigen::VectorXd coefficients;

  FieldFunction() = default;
  explicit FieldFunction(const DofMap& map)
      : dofmap(&map), coefficients(Eigen::VectorXd::Zero(map.total_dofs())) {}
  FieldFunction(const DofMap& map, Eigen::VectorXd coeffs);

  // Cellwise evaluation at a reference point.
  Vec3 vector_value(Index cell, const Vec3& ref) const;
  double scalar_value(Index cell, const Vec3& ref) const;
  double divergence(Index cell) const;           // HdivLinear, cellwise constant
  Vec3 curl(Index cell) const;                   // HcurlNedelec2Deg1, cellwise constant
  Vec3 gradient(Index cell, const Vec3& ref) const;  // H1P2

  // Evaluation at a physical point (cell located on the structured mesh).
  Vec3 vector_at(const Vec3& x) const;
  double scalar_at(const Vec3& x) const;
};

// Degree-of-freedom functionals evaluated in physical space.
std::array<double, 2> edge_moments(const Mesh& mesh, Index edge, const VectorField& v);
std::array<double, 3> face_moments(const Mesh& mesh, Index face, const VectorField& v);

FieldFunction interpolate(const DofMap& dofmap, const VectorField& exact);
FieldFunction interpolate(const DofMap& dofmap, const ScalarField& exact);

// Marks every DOF on boundary entities as constrained to the interpolant of
// the data. Vector data for HcurlNedelec2Deg1, scalar data for H1P2.
DofMap constrained_dofs(const DofMap& dofmap, const VectorField& boundary_data);
DofMap constrained_dofs(const DofMap& dofmap, const ScalarField& boundary_data);

}  // namespace mhdk
