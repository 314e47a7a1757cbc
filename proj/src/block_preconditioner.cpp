#include "mhdk/block_preconditioner.hpp"

#include <chrono>

namespace mhdk {

namespace {

constexpr double kExactInnerTol = 1e-12;

void inner_solve(const CsrMatrix& a, const Vector& rhs, Vector& x, const PreconditionerOptions& opt,
                 long& iterations, int& failures) {
  x = Vector::Zero(rhs.size());
  const double tol = opt.exact_inner ? kExactInnerTol : opt.inner_tol;
  const int max_iter = opt.exact_inner ? std::max<int>(opt.inner_max_iter, 20000) : opt.inner_max_iter;
  const SolverReport rep = cg_solve(a, rhs, x, opt.inner_precond, tol, max_iter);
  iterations += rep.iterations;
  if (!rep.converged) ++failures;
}

}  // namespace

void apply_P_inverse(const BlockSystem& sys, const Vector& res, Vector& e,
                     const PreconditionerOptions& options, SolverReport& report) {
  const BlockPartition& p = sys.partition;
  if (res.size() != p.total()) throw InvalidArgument("apply_P_inverse: dimension mismatch");
  e = Vector::Zero(p.total());

  Vector e_r;
  inner_solve(sys.L, -p.segment(res, kR), e_r, options, report.inner_iterations_L, report.inner_failures);

  Vector rhs_A = p.segment(res, kA);
  spmv_transpose_add(sys.B, e_r, -2.0, rhs_A);
  Vector e_A;
  inner_solve(sys.Fhat, rhs_A, e_A, options, report.inner_iterations_F, report.inner_failures);

  const Vector q = sys.Qhat.diagonal_values();
  const Vector e_phi = -p.segment(res, kPhi).cwiseQuotient(q);

  Vector rhs_J = p.segment(res, kJ);
  spmv_transpose_add(sys.G, e_phi, -2.0, rhs_J);
  spmv_add(sys.K, e_A, -1.0, rhs_J);
  Vector e_J;
  inner_solve(sys.Mhat, rhs_J, e_J, options, report.inner_iterations_M, report.inner_failures);

  p.segment(e, kJ) = e_J;
  p.segment(e, kPhi) = e_phi;
  p.segment(e, kA) = e_A;
  p.segment(e, kR) = e_r;
}

MhdSolution solve_mhd_system(const BlockSystem& sys, const MixedSpaces& spaces, const SolveOptions& options) {
  if (!sys.constrained) throw InvalidArgument("solve_mhd_system: constraints not applied");
  if (!(options.eps > 0.0 && options.eps < 1.0)) throw InvalidArgument("solve_mhd_system: eps must lie in (0,1)");
  if (!(options.preconditioner.inner_tol > 0.0 && options.preconditioner.inner_tol < 1.0)) {
    throw InvalidArgument("solve_mhd_system: inner tolerance must lie in (0,1)");
  }
  if (options.max_iter < 1) throw InvalidArgument("solve_mhd_system: max_iter must be positive");
  const auto start = std::chrono::steady_clock::now();

  SolverReport inner;
  const LinearOperator op = [&sys](const Vector& in, Vector& out) { apply_operator(sys, in, out); };
  const LinearOperator pre = [&](const Vector& in, Vector& out) {
    apply_P_inverse(sys, in, out, options.preconditioner, inner);
  };
  FgmresOptions fo;
  fo.rel_tol = options.eps;
  fo.max_iter = options.max_iter;
  Vector x;
  SolverReport report = fgmres_solve(op, sys.rhs, pre, x, fo);
  report.inner_iterations_M = inner.inner_iterations_M;
  report.inner_iterations_F = inner.inner_iterations_F;
  report.inner_iterations_L = inner.inner_iterations_L;
  report.inner_failures = inner.inner_failures;

  Vector check;
  apply_operator(sys, x, check);
  const double bnorm = sys.rhs.norm();
  report.final_true_relative_residual = bnorm > 0.0 ? (sys.rhs - check).norm() / bnorm : check.norm();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const BlockPartition& p = sys.partition;
  MhdSolution sol{FieldFunction(spaces.D, p.segment(x, kJ)), FieldFunction(spaces.S, p.segment(x, kPhi)),
                  FieldFunction(spaces.C, p.segment(x, kA)), FieldFunction(spaces.R, p.segment(x, kR)),
                  std::move(report)};
  return sol;
}

MhdSolution solve_problem(const ProblemSpec& problem, const MixedSpaces& spaces, const SolveOptions& options) {
  BlockSystem sys = assemble_system(problem, spaces);
  apply_constraints(sys, spaces);
  return solve_mhd_system(sys, spaces, options);
}

}  // namespace mhdk
