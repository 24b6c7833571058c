#pragma once

// Sparse matrices and direct/iterative solvers.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thermodamage/space.hpp"

namespace thermodamage {

class SolverBreakdown : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Compressed sparse row matrix with sorted, unique column indices.
struct SystemMatrix {
  CsrMatrix csr;

  SystemMatrix() = default;
  explicit SystemMatrix(CsrMatrix m) : csr(std::move(m)) { csr.makeCompressed(); }

  /// Duplicate (i, j) entries are summed in input order.
  static SystemMatrix from_triplets(Eigen::Index n, const std::vector<Triplet>& t) {
    CsrMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return SystemMatrix(std::move(m));
  }

  static SystemMatrix identity(Eigen::Index n) {
    CsrMatrix m(n, n);
    m.setIdentity();
    return SystemMatrix(std::move(m));
  }

  Eigen::Index rows() const { return csr.rows(); }

  double coeff(Eigen::Index i, Eigen::Index j) const { return csr.coeff(i, j); }

  /// max_ij |A_ij - A_ji|
  double asymmetry() const {
    const CsrMatrix t = csr.transpose();
    const CsrMatrix d = csr - t;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d.nonZeros(); ++k) worst = std::max(worst, std::abs(d.valuePtr()[k]));
    return worst;
  }

  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(csr); }
};

inline Vector spmv(const SystemMatrix& A, const Vector& x) {
  if (A.csr.cols() != x.size()) {
    throw std::invalid_argument("spmv: dimension mismatch (" + std::to_string(A.csr.cols()) + " columns, vector of " +
                                std::to_string(x.size()) + ")");
  }
  return A.csr * x;
}

struct FactorizationInfo {
  double min_pivot = 0.0;  // smallest |D_ii|
  double max_pivot = 0.0;
  Eigen::Index negative_pivots = 0;
  int refinement_steps = 0;
  bool spd() const { return negative_pivots == 0 && min_pivot > 0.0; }
};

/// Sparse LDL^T (approximate minimum degree ordering) with iterative refinement.
/// The matrix must be symmetric; only its lower triangle is read.
inline Vector solve_direct(const SystemMatrix& A, const Vector& b, FactorizationInfo* info = nullptr) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve_direct: dimension mismatch");
  if (A.rows() == 0) return Vector();
  const Eigen::SparseMatrix<double> cm = A.csr;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(cm);
  if (ldlt.info() != Eigen::Success) throw SolverBreakdown("solve_direct: LDL^T factorization failed (zero pivot)");
  const Vector D = ldlt.vectorD();
  FactorizationInfo fi;
  fi.min_pivot = D.cwiseAbs().minCoeff();
  fi.max_pivot = D.cwiseAbs().maxCoeff();
  fi.negative_pivots = (D.array() < 0.0).count();
  if (!(fi.min_pivot > 1e-14 * fi.max_pivot)) {
    std::ostringstream os;
    os << "solve_direct: singular matrix (min |pivot| = " << fi.min_pivot << ", max |pivot| = " << fi.max_pivot << ")";
    throw SolverBreakdown(os.str());
  }
  Vector x = ldlt.solve(b);
  const double bn = b.norm();
  for (int it = 0; it < 3; ++it) {
    const Vector r = b - cm * x;
    if (r.norm() <= 1e-12 * bn) break;
    x += ldlt.solve(r);
    ++fi.refinement_steps;
  }
  if (!x.allFinite()) throw SolverBreakdown("solve_direct: non-finite solution");
  if (info) *info = fi;
  return x;
}

/// Sparse LU for the non-symmetric Jacobians of temperature-dependent conduction.
inline Vector solve_general(const SystemMatrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve_general: dimension mismatch");
  if (A.rows() == 0) return Vector();
  const Eigen::SparseMatrix<double> cm = A.csr;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(cm);
  if (lu.info() != Eigen::Success) throw SolverBreakdown("solve_general: LU factorization failed: " + lu.lastErrorMessage());
  Vector x = lu.solve(b);
  const Vector r = b - cm * x;
  if (r.norm() > 1e-12 * b.norm()) x += lu.solve(r);
  if (!x.allFinite()) throw SolverBreakdown("solve_general: non-finite solution");
  return x;
}

/// Conjugate gradients with a diagonal preconditioner, for large SPD systems.
inline Vector solve_cg(const SystemMatrix& A, const Vector& b, double tol = 1e-12, int max_iter = 10000) {
  if (A.rows() != b.size()) throw std::invalid_argument("solve_cg: dimension mismatch");
  const Eigen::SparseMatrix<double> cm = A.csr;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iter);
  cg.compute(cm);
  Vector x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    throw SolverBreakdown("solve_cg: no convergence after " + std::to_string(cg.iterations()) + " iterations");
  }
  return x;
}

enum class LinearSolverKind { direct, cg };

/// Solves with the configured method; non-symmetric matrices always go to LU.
inline Vector solve_linear(const SystemMatrix& A, const Vector& b, bool symmetric, LinearSolverKind kind = LinearSolverKind::direct) {
  if (!symmetric) return solve_general(A, b);
  if (kind == LinearSolverKind::cg) return solve_cg(A, b);
  return solve_direct(A, b);
}

/// Coordinate text format: first line "n nnz", then "i j value" per entry.
inline void write_coordinate(std::ostream& os, const SystemMatrix& A) {
  os.precision(17);
  os << A.csr.rows() << ' ' << A.csr.nonZeros() << '\n';
  for (Eigen::Index i = 0; i < A.csr.outerSize(); ++i) {
    for (CsrMatrix::InnerIterator it(A.csr, i); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

inline SystemMatrix read_coordinate(std::istream& is) {
  Eigen::Index n = 0, nnz = 0;
  if (!(is >> n >> nnz) || n < 0 || nnz < 0) throw std::invalid_argument("read_coordinate: bad header");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (Eigen::Index k = 0; k < nnz; ++k) {
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) throw std::invalid_argument("read_coordinate: truncated entry list");
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("read_coordinate: index out of range");
    t.emplace_back(i, j, v);
  }
  return SystemMatrix::from_triplets(n, t);
}

}  // namespace thermodamage
