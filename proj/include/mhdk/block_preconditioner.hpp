#pragma once

#include "mhdk/assembly.hpp"

namespace mhdk {

struct PreconditionerOptions {
  // Relative tolerance and cap of the inner CG solves for Mhat, Fhat and L.
  double inner_tol = 1e-3;
  int inner_max_iter = 2000;
  // Solve the inner blocks to 1e-12 instead (reference behaviour).
  bool exact_inner = false;
  CgPreconditioner inner_precond = CgPreconditioner::SymmetricGaussSeidel;
};

// Block upper-triangular preconditioner
//   [ Mhat  2G^T   K     0    ]
//   [ 0     -Qhat  0     0    ]
//   [ 0     0      Fhat  2B^T ]
//   [ 0     0      0     -L   ]
// applied by back substitution, last block first:
//   e_r   = -L^{-1} res_r
//   e_A   = Fhat^{-1} (res_A - 2 B^T e_r)
//   e_phi = -Qhat^{-1} res_phi
//   e_J   = Mhat^{-1} (res_J - 2 G^T e_phi - K e_A)
// Inner iteration counts and non-converged inner solves accumulate into report.
void apply_P_inverse(const BlockSystem& system, const Vector& res, Vector& e,
                     const PreconditionerOptions& options, SolverReport& report);

struct MhdSolution {
  FieldFunction J;
  FieldFunction phi;
  FieldFunction A;
  FieldFunction r;
  SolverReport report;
};

struct SolveOptions {
  double eps = 1e-10;
  int max_iter = 500;
  PreconditionerOptions preconditioner;
};

// FGMRES on a constrained system; the constrained values already sit in the
// solution because of the identity rows.
MhdSolution solve_mhd_system(const BlockSystem& system, const MixedSpaces& spaces,
                             const SolveOptions& options = {});

// Assemble, constrain and solve in one call.
MhdSolution solve_problem(const ProblemSpec& problem, const MixedSpaces& spaces,
                          const SolveOptions& options = {});

}  // namespace mhdk
