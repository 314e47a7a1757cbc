#pragma once

#include "mhdk/fem_spaces.hpp"
#include "mhdk/problems.hpp"
#include "mhdk/sparse.hpp"

#include <array>
#include <string_view>

namespace mhdk {

// The four discrete spaces of the scheme on one mesh. C and R carry the
// essential constraints (A x n = A_w x n, r = 0 on the boundary).
struct MixedSpaces {
  DofMap D;  // current density J_h
  DofMap S;  // electric potential phi_h
  DofMap C;  // vector potential A_h
  DofMap R;  // multiplier r_h
};

MixedSpaces build_mixed_spaces(const Mesh& mesh, const ProblemSpec& problem);
// Same spaces with homogeneous constraints on C and R.
MixedSpaces build_mixed_spaces(const Mesh& mesh);

// Offsets of the (J, phi, A, r) segments of a global vector.
struct BlockPartition {
  std::array<Index, 5> offsets{0, 0, 0, 0, 0};

  Index size(int block) const { return offsets[block + 1] - offsets[block]; }
  Index total() const { return offsets[4]; }
  auto segment(Vector& v, int block) const { return v.segment(offsets[block], size(block)); }
  auto segment(const Vector& v, int block) const { return v.segment(offsets[block], size(block)); }
};

BlockPartition make_partition(const MixedSpaces& spaces);

enum BlockIndex : int { kJ = 0, kPhi = 1, kA = 2, kR = 3 };

enum class BlockId { M, G, K, X, F, B, Mhat, Qhat, Fhat, L };
std::string_view to_string(BlockId id);

// Outer operator
//   [ M   G^T  K    0  ]
//   [ G   0    0    0  ]
//   [ X   0    F    B^T]
//   [ 0   0    B    Drr]
// with Drr nonzero only on constrained multiplier DOFs, plus the
// preconditioner blocks Mhat, Qhat, Fhat, L.
struct BlockSystem {
  CsrMatrix M, G, K, X, F, B;
  Vector r_diag;
  CsrMatrix Mhat, Qhat, Fhat, L;
  Vector rhs;
  BlockPartition partition;
  double sigma = 1.0;
  double rm = 1.0;
  bool constrained = false;
};

// Entry definitions (eta = 1/sigma, nu_m = 1/Rm):
//   M_ij = eta (phi_j, phi_i)           G_ij = -(div phi_j, psi_i)
//   K_ij = (curl a_j x w, phi_i)        X_ij = -(phi_j, a_i)
//   F_ij = nu_m (curl a_j, curl a_i)    B_ij = (a_j, grad s_i)
//   Mhat = eta[(phi_j, phi_i) + (div phi_j, div phi_i)]
//   Qhat = sigma (psi_j, psi_i)
//   Fhat = nu_m (curl a_j, curl a_i) + (a_j, a_i)
//   L_ij = (grad s_j, grad s_i)
// w is required for K only.
CsrMatrix assemble_block(BlockId id, const MixedSpaces& spaces, double sigma, double rm,
                         const VectorField* w = nullptr);

// b_J = (f, phi_i) - <phi_w, phi_i . n>_boundary, b_phi = 0, b_A = (g, a_i), b_r = 0.
Vector assemble_rhs(const ProblemSpec& problem, const MixedSpaces& spaces);

// All blocks and the right-hand side, before constraints.
BlockSystem assemble_system(const ProblemSpec& problem, const MixedSpaces& spaces);

// Symmetric elimination of the constrained A and r DOFs across every block.
// Constrained A rows become identity rows of F and Fhat; constrained r rows
// become -1 on Drr (matching the -L block of the preconditioner) and identity
// rows of L. The right-hand side is lifted by the prescribed values.
void apply_constraints(BlockSystem& system, const MixedSpaces& spaces);

// y = A x for the outer operator.
void apply_operator(const BlockSystem& system, const Vector& x, Vector& y);

// Export in MatrixMarket coordinate format.
void write_matrix_market(const CsrMatrix& a, const std::string& path);

}  // namespace mhdk
