#pragma once

#include "mhdk/assembly.hpp"
#include "mhdk/block_preconditioner.hpp"

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhdk {

enum class NormKind { L2, HcurlFull };

// ||u - u_h|| by the assembly tet rule. HcurlFull (C_h fields only) adds the
// curl part and needs exact_curl.
double error_norm(const FieldFunction& field, const VectorField& exact, NormKind kind = NormKind::L2,
                  const VectorField* exact_curl = nullptr);
double error_norm(const FieldFunction& field, const ScalarField& exact);

// L2 norm of a field (zero exact solution).
double l2_norm(const FieldFunction& field);

// ||div J_h||_{L2} from the cellwise constant divergence.
double div_norm(const FieldFunction& j_h);

// Cellwise constant B_h = curl A_h.
std::vector<Vec3> recover_B(const FieldFunction& a_h);
// Largest |[B_h . n]| over interior faces.
double b_div_check(const Mesh& mesh, const std::vector<Vec3>& b_cells);

// E_h = eta J_h - w x curl A_h. The returned evaluator keeps references to
// the fields.
VectorField recover_E(const FieldFunction& j_h, const FieldFunction& a_h, const ProblemSpec& problem);

struct ImprovedPotential {
  FieldFunction phi;          // over the P2 space passed in, zero on the boundary
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Poisson projection (grad phi, grad s) = (w x curl A_h + f, grad s) with
// phi = 0 on the boundary. p2_space must be an H1P2 map whose constraints
// are the boundary DOFs.
ImprovedPotential improve_phi(const FieldFunction& a_h, const ProblemSpec& problem, const DofMap& p2_space,
                              double rel_tol = 1e-10);

struct EnergyBalance {
  double lhs1 = 0.0;  // eta ||J_h||^2
  double rhs1 = 0.0;  // (f, J_h) - (J_h x B_h, w) - boundary work of phi_w
  double lhs2 = 0.0;  // nu_m ||B_h||^2
  double rhs2 = 0.0;  // (g, A_h) + (J_h, A_h) + boundary work on constrained A DOFs

  double defect1() const;  // |lhs1 - rhs1| / max(|lhs1|, |rhs1|), 0 when both vanish
  double defect2() const;
};

// Both boundary work terms vanish for homogeneous boundary data.
EnergyBalance energy_check(const MhdSolution& solution, const ProblemSpec& problem, const MixedSpaces& spaces);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double e_J = 0.0;
  double e_phi = 0.0;
  double e_Acurl = 0.0;
  double e_AL2 = 0.0;
  double divJ = 0.0;
  std::optional<double> ord_J, ord_phi, ord_Acurl, ord_AL2;
  int iterations = 0;
  bool converged = true;
};

// Fills the orders log2(e_prev / e) from the previous row; absent for the
// first row and whenever either error is not positive.
void convergence_order(std::vector<ConvergenceRow>& rows);

nlohmann::json to_json(const ConvergenceRow& row);

}  // namespace mhdk
