#include "conreg/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"

namespace conreg {

namespace {

void require_finite(const Matrix& a, const char* op) {
  if (a.rows() < 1 || a.cols() < 1) {
    std::ostringstream msg;
    msg << op << ": empty matrix (" << a.rows() << "x" << a.cols() << ")";
    throw std::invalid_argument(msg.str());
  }
  if (!a.allFinite()) {
    std::ostringstream msg;
    msg << op << ": non-finite entries in " << a.rows() << "x" << a.cols() << " matrix";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  require_finite(a, "svd");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "svd: iteration did not converge for " << a.rows() << "x" << a.cols() << " matrix";
    throw convergence_error(msg.str(), -1.0, -1);
  }
  SvdFactors f;
  f.u = dec.matrixU();
  f.sigma = dec.singularValues();
  f.vt = dec.matrixV().transpose();
  const double sigma_max = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  f.rank_tol = 1e-12 * sigma_max * static_cast<double>(std::max(a.rows(), a.cols()));
  f.numerical_rank = 0;
  for (Index i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) > f.rank_tol) ++f.numerical_rank;
  }
  return f;
}

namespace detail {

Matrix pinv_from(const SvdFactors& f) {
  const Index r = f.numerical_rank;
  const Index d = f.vt.cols();
  const Index n = f.u.rows();
  if (r == 0) return Matrix::Zero(d, n);
  Vector inv_sigma(r);
  for (Index i = 0; i < r; ++i) inv_sigma(i) = 1.0 / f.sigma(i);
  return f.vt.topRows(r).transpose() * inv_sigma.asDiagonal() * f.u.leftCols(r).transpose();
}

Matrix row_projection_from(const SvdFactors& f) {
  const Index r = f.numerical_rank;
  const Index d = f.vt.cols();
  if (r == 0) return Matrix::Zero(d, d);
  const Matrix vr = f.vt.topRows(r).transpose();  // d x r
  return vr * vr.transpose();
}

}  // namespace detail

Matrix pinv(const Matrix& a) { return detail::pinv_from(svd(a)); }

Matrix row_space_projection(const Matrix& a) {
  return detail::row_projection_from(svd(a));
}

Matrix complement_projection(const Matrix& a) {
  const Matrix p = row_space_projection(a);
  return Matrix::Identity(p.rows(), p.cols()) - p;
}

Vector min_norm_solve(const Matrix& a, const Vector& b) {
  require_finite(a, "min_norm_solve");
  if (b.size() != a.rows()) {
    throw std::invalid_argument("min_norm_solve: rhs length does not match matrix rows");
  }
  const SvdFactors f = svd(a);
  const Vector w = detail::pinv_from(f) * b;
  const double residual = (a * w - b).norm();
  if (residual > 1e-8 * (1.0 + b.norm())) {
    std::ostringstream msg;
    msg << "min_norm_solve: not jointly realizable, residual " << residual;
    throw not_realizable_error(msg.str(), residual);
  }
  return w;
}

double spectral_norm(const Matrix& a) {
  const SvdFactors f = svd(a);
  return f.sigma.size() > 0 ? f.sigma(0) : 0.0;
}

}  // namespace conreg
