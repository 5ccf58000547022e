#pragma once

#include <Eigen/Dense>

namespace conreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// SVD factorization A = U diag(sigma) V^T with a numerical-rank cutoff.
// sigma is non-increasing; singular values at or below rank_tol are treated
// as zero everywhere downstream (pinv, projections, rank).
struct SvdFactors {
  Matrix u;       // orthonormal columns, rows(A) x min(rows, cols)
  Vector sigma;   // non-increasing, >= 0
  Matrix vt;      // orthonormal rows, min(rows, cols) x cols(A)
  double rank_tol = 0.0;
  Index numerical_rank = 0;

  Matrix reconstruct() const { return u * sigma.asDiagonal() * vt; }
};

// Throws std::invalid_argument on non-finite input, conreg::convergence_error
// if the underlying iteration fails (error message names the matrix shape).
SvdFactors svd(const Matrix& a);

// Moore-Penrose pseudo-inverse via SVD with the rank_tol cutoff.
Matrix pinv(const Matrix& a);

// Orthogonal projection onto the row space of A, i.e. A^+ A.
Matrix row_space_projection(const Matrix& a);

// I - A^+ A, the projector onto the null space of A.
Matrix complement_projection(const Matrix& a);

// Minimum-norm solution of A w = b. Throws conreg::not_realizable_error when
// the system is inconsistent beyond 1e-8 * (1 + |b|).
Vector min_norm_solve(const Matrix& a, const Vector& b);

// Largest singular value.
double spectral_norm(const Matrix& a);

namespace detail {
// Convenience accessors over the truncated factors (rank r = numerical_rank).
Matrix pinv_from(const SvdFactors& f);
Matrix row_projection_from(const SvdFactors& f);
}  // namespace detail

}  // namespace conreg
