#pragma once

#include "mhdk/types.hpp"

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mhdk {

using Vector = Eigen::VectorXd;

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed sparse row storage; column indices strictly ascending per row.
class CsrMatrix {
public:
  CsrMatrix() = default;
  CsrMatrix(Index rows, Index cols);

  // Duplicates are summed in insertion order, so the result is deterministic
  // for a deterministic triplet sequence.
  static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(Index n);
  static CsrMatrix diagonal(const Vector& d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return offsets_; }
  const std::vector<Index>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Entry lookup (binary search); zero when not stored.
  double coeff(Index i, Index j) const;
  Vector diagonal_values() const;
  double max_abs() const;
  CsrMatrix transpose() const;

  // Zeroes every stored entry of row i / column j.
  void zero_row(Index i);
  void zero_columns(const std::vector<char>& mask);
  // Sets a stored diagonal entry; throws if the diagonal is not in the pattern.
  void set_diagonal(Index i, double value);

  Eigen::MatrixXd to_dense() const;

private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> cols_idx_;
  std::vector<double> values_;
};

// y = A x
Vector spmv(const CsrMatrix& a, const Vector& x);
// y += alpha * A x
void spmv_add(const CsrMatrix& a, const Vector& x, double alpha, Vector& y);
// y += alpha * A^T x
void spmv_transpose_add(const CsrMatrix& a, const Vector& x, double alpha, Vector& y);

// max |A - A^T| over stored entries, relative to max |A|.
double symmetry_defect(const CsrMatrix& a);

enum class CgPreconditioner { None, Jacobi, SymmetricGaussSeidel };

struct SolverReport {
  int iterations = 0;
  std::vector<double> relative_residuals;
  bool converged = false;
  double final_true_relative_residual = 0.0;
  // Totals of inner iterations per preconditioner block (outer solves only).
  long inner_iterations_M = 0;
  long inner_iterations_F = 0;
  long inner_iterations_L = 0;
  int inner_failures = 0;
  double seconds = 0.0;
};

nlohmann::json to_json(const SolverReport& report);

// Preconditioned conjugate gradients from x0 = x (pass zeros for a cold
// start). Stops when ||b - Ax|| <= rel_tol ||b||.
SolverReport cg_solve(const CsrMatrix& a, const Vector& b, Vector& x, CgPreconditioner precond,
                      double rel_tol, int max_iter);

using LinearOperator = std::function<void(const Vector& in, Vector& out)>;

// Flexible GMRES, right preconditioned, no restart, x0 = 0. The
// preconditioner may change between iterations. Stops when
// ||b - A x_k|| <= rel_tol ||b||.
struct FgmresOptions {
  double rel_tol = 1e-10;
  int max_iter = 500;
  // A second Gram-Schmidt pass runs when the largest normalized projection
  // left after the first exceeds this.
  double reorthogonalization_threshold = 1e-8;
};

SolverReport fgmres_solve(const LinearOperator& a, const Vector& b, const LinearOperator& right_precond,
                          Vector& x, const FgmresOptions& options);

}  // namespace mhdk
