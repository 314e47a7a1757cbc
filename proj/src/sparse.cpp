#include "mhdk/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include <nlohmann/json.hpp>

namespace mhdk {

CsrMatrix::CsrMatrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), offsets_(static_cast<std::size_t>(rows + 1), 0) {}

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw InvalidArgument("CsrMatrix::from_triplets: index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m(rows, cols);
  m.cols_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t k = 0;
  for (Index r = 0; r < rows; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const Index c = triplets[k].col;
      double v = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
        v += triplets[k].value;
        ++k;
      }
      m.cols_idx_.push_back(c);
      m.values_.push_back(v);
    }
    m.offsets_[r + 1] = static_cast<Index>(m.values_.size());
  }
  return m;
}

CsrMatrix CsrMatrix::identity(Index n) { return diagonal(Vector::Ones(n)); }

CsrMatrix CsrMatrix::diagonal(const Vector& d) {
  CsrMatrix m(d.size(), d.size());
  for (Index i = 0; i < d.size(); ++i) {
    m.cols_idx_.push_back(i);
    m.values_.push_back(d[i]);
    m.offsets_[i + 1] = i + 1;
  }
  return m;
}

double CsrMatrix::coeff(Index i, Index j) const {
  const auto begin = cols_idx_.begin() + offsets_[i];
  const auto end = cols_idx_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[it - cols_idx_.begin()];
}

Vector CsrMatrix::diagonal_values() const {
  Vector d = Vector::Zero(std::min(rows_, cols_));
  for (Index i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) t.push_back({cols_idx_[k], i, values_[k]});
  }
  return from_triplets(cols_, rows_, std::move(t));
}

void CsrMatrix::zero_row(Index i) {
  for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) values_[k] = 0.0;
}

void CsrMatrix::zero_columns(const std::vector<char>& mask) {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (mask[cols_idx_[k]]) values_[k] = 0.0;
  }
}

void CsrMatrix::set_diagonal(Index i, double value) {
  const auto begin = cols_idx_.begin() + offsets_[i];
  const auto end = cols_idx_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, i);
  if (it == end || *it != i) throw InvalidArgument("CsrMatrix::set_diagonal: entry not stored");
  values_[it - cols_idx_.begin()] = value;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    for (Index k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, cols_idx_[k]) += values_[k];
  }
  return d;
}

Vector spmv(const CsrMatrix& a, const Vector& x) {
  Vector y = Vector::Zero(a.rows());
  spmv_add(a, x, 1.0, y);
  return y;
}

void spmv_add(const CsrMatrix& a, const Vector& x, double alpha, Vector& y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw InvalidArgument("spmv: dimension mismatch");
  }
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] += alpha * s;
  }
}

void spmv_transpose_add(const CsrMatrix& a, const Vector& x, double alpha, Vector& y) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw InvalidArgument("spmv_transpose: dimension mismatch");
  }
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    const double xi = alpha * x[i];
    if (xi == 0.0) continue;
    for (Index k = off[i]; k < off[i + 1]; ++k) y[col[k]] += val[k] * xi;
  }
}

double symmetry_defect(const CsrMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const double scale = a.max_abs();
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = off[i]; k < off[i + 1]; ++k) {
      d = std::max(d, std::abs(val[k] - a.coeff(col[k], i)));
    }
  }
  return d / scale;
}

nlohmann::json to_json(const SolverReport& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"relative_residuals", r.relative_residuals},
          {"final_true_relative_residual", r.final_true_relative_residual},
          {"inner_iterations", {{"Mhat", r.inner_iterations_M},
                                {"Fhat", r.inner_iterations_F},
                                {"L", r.inner_iterations_L}}},
          {"inner_failures", r.inner_failures}};
}

namespace {

class SgsSweep {
public:
  explicit SgsSweep(const CsrMatrix& a) : a_(a), diag_(a.diagonal_values()) {
    for (Index i = 0; i < diag_.size(); ++i) {
      if (!(diag_[i] != 0.0) || !std::isfinite(diag_[i])) {
        throw NumericalError("symmetric Gauss-Seidel: zero or non-finite diagonal");
      }
    }
  }

  void apply(const Vector& r, Vector& z) const {
    const auto& off = a_.row_offsets();
    const auto& col = a_.col_indices();
    const auto& val = a_.values();
    const Index n = a_.rows();
    z.resize(n);
    for (Index i = 0; i < n; ++i) {
      double s = r[i];
      for (Index k = off[i]; k < off[i + 1] && col[k] < i; ++k) s -= val[k] * z[col[k]];
      z[i] = s / diag_[i];
    }
    for (Index i = n - 1; i >= 0; --i) {
      double s = 0.0;
      for (Index k = off[i + 1] - 1; k >= off[i] && col[k] > i; --k) s += val[k] * z[col[k]];
      z[i] -= s / diag_[i];
    }
  }

private:
  const CsrMatrix& a_;
  Vector diag_;
};

}  // namespace

SolverReport cg_solve(const CsrMatrix& a, const Vector& b, Vector& x, CgPreconditioner precond,
                      double rel_tol, int max_iter) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw InvalidArgument("cg_solve: dimension mismatch");
  }
  if (x.size() != b.size()) x = Vector::Zero(b.size());
  SolverReport report;
  const double bnorm = b.norm();
  if (!std::isfinite(bnorm)) throw NumericalError("cg_solve: non-finite right-hand side");
  if (bnorm == 0.0) {
    x.setZero();
    report.converged = true;
    report.relative_residuals.push_back(0.0);
    return report;
  }

  Vector inv_diag;
  std::unique_ptr<SgsSweep> sgs;
  if (precond == CgPreconditioner::Jacobi) {
    inv_diag = a.diagonal_values().cwiseInverse();
  } else if (precond == CgPreconditioner::SymmetricGaussSeidel) {
    sgs = std::make_unique<SgsSweep>(a);
  }
  auto apply_precond = [&](const Vector& r, Vector& z) {
    if (precond == CgPreconditioner::Jacobi) {
      z = inv_diag.cwiseProduct(r);
    } else if (sgs) {
      sgs->apply(r, z);
    } else {
      z = r;
    }
  };

  Vector r = b - spmv(a, x);
  double rnorm = r.norm();
  report.relative_residuals.push_back(rnorm / bnorm);
  if (rnorm <= rel_tol * bnorm) {
    report.converged = true;
    return report;
  }
  Vector z;
  apply_precond(r, z);
  Vector p = z;
  Vector ap(b.size());
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    ap.setZero();
    spmv_add(a, p, 1.0, ap);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap) || pap <= 0.0) {
      throw NumericalError("cg_solve: operator not positive definite or non-finite iterate");
    }
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    rnorm = r.norm();
    report.iterations = it;
    report.relative_residuals.push_back(rnorm / bnorm);
    if (!std::isfinite(rnorm)) throw NumericalError("cg_solve: non-finite residual");
    if (rnorm <= rel_tol * bnorm) {
      report.converged = true;
      break;
    }
    apply_precond(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  report.final_true_relative_residual = (b - spmv(a, x)).norm() / bnorm;
  return report;
}

SolverReport fgmres_solve(const LinearOperator& a, const Vector& b, const LinearOperator& precond,
                          Vector& x, const FgmresOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Index n = b.size();
  x = Vector::Zero(n);
  SolverReport report;
  const double beta = b.norm();
  if (!std::isfinite(beta)) throw NumericalError("fgmres_solve: non-finite right-hand side");
  if (beta == 0.0) {
    report.converged = true;
    report.relative_residuals.push_back(0.0);
    return report;
  }
  report.relative_residuals.push_back(1.0);

  const int m = options.max_iter;
  std::vector<Vector> v;
  std::vector<Vector> z;
  v.push_back(b / beta);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Vector cs = Vector::Zero(m);
  Vector sn = Vector::Zero(m);
  Vector g = Vector::Zero(m + 1);
  g[0] = beta;

  int k = 0;
  bool done = false;
  Vector w(n);
  while (k < m && !done) {
    z.emplace_back(n);
    precond(v[k], z[k]);
    w.setZero();
    a(z[k], w);
    const double wnorm0 = w.norm();
    for (int i = 0; i <= k; ++i) {
      h(i, k) = w.dot(v[i]);
      w -= h(i, k) * v[i];
    }
    double wnorm = w.norm();
    if (wnorm > 0.0) {
      Vector corr(k + 1);
      for (int i = 0; i <= k; ++i) corr[i] = w.dot(v[i]);
      if (corr.cwiseAbs().maxCoeff() > options.reorthogonalization_threshold * wnorm) {
        for (int i = 0; i <= k; ++i) {
          w -= corr[i] * v[i];
          h(i, k) += corr[i];
        }
        wnorm = w.norm();
      }
    }
    h(k + 1, k) = wnorm;
    if (!std::isfinite(wnorm)) throw NumericalError("fgmres_solve: non-finite Krylov vector");

    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
      h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
      h(i, k) = t;
    }
    const double denom = std::hypot(h(k, k), h(k + 1, k));
    if (denom == 0.0) throw NumericalError("fgmres_solve: Hessenberg breakdown (singular)");
    cs[k] = h(k, k) / denom;
    sn[k] = h(k + 1, k) / denom;
    h(k, k) = denom;
    h(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];

    const double rel = std::abs(g[k + 1]) / beta;
    report.relative_residuals.push_back(rel);
    ++k;
    const bool happy = wnorm <= 1e-14 * std::max(wnorm0, 1e-300);
    if (rel <= options.rel_tol || happy) {
      done = true;
    } else {
      v.push_back(w / wnorm);
    }
  }

  Vector y = g.head(k);
  for (int i = k - 1; i >= 0; --i) {
    for (int j = i + 1; j < k; ++j) y[i] -= h(i, j) * y[j];
    y[i] /= h(i, i);
  }
  for (int i = 0; i < k; ++i) x += y[i] * z[i];

  report.iterations = k;
  report.converged = report.relative_residuals.back() <= options.rel_tol;
  Vector ax = Vector::Zero(n);
  a(x, ax);
  report.final_true_relative_residual = (b - ax).norm() / beta;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mhdk
