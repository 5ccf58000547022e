#include "conreg/qmap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"
#include "conreg/learners.hpp"
#include "conreg/rng.hpp"

namespace conreg {

QOperator build_q(const TaskCollection& c) {
  QOperator q;
  q.dim = c.dim;
  q.T = c.num_tasks();
  q.projections.reserve(c.tasks.size());
  for (const auto& t : c.tasks) q.projections.push_back(complement_projection(t.x));
  return q;
}

Matrix apply_q(const QOperator& q, const Matrix& a) {
  if (a.rows() != q.dim || a.cols() != q.dim)
    throw std::invalid_argument("apply_q: matrix must be d x d");
  Matrix out = Matrix::Zero(q.dim, q.dim);
  for (const auto& p : q.projections) out.noalias() += p * a * p;
  return out / static_cast<double>(q.T);
}

Matrix apply_q_power(const QOperator& q, Matrix a, int n) {
  for (int i = 0; i < n; ++i) a = apply_q(q, a);
  return a;
}

namespace {

Matrix apply_poly(const QOperator& q, const Matrix& a, int n, bool with_residual) {
  Matrix qn = apply_q_power(q, a, n);
  if (!with_residual) return qn;
  return qn - apply_q(q, qn);
}

}  // namespace

double q_operator_norm_power(const QOperator& q, int poly_n, bool with_residual_factor) {
  if (poly_n < 0) throw std::invalid_argument("q_operator_norm: n >= 0 required");
  if (poly_n == 0 && !with_residual_factor) return 1.0;  // identity map

  constexpr long kMaxIters = 30000;
  constexpr int kWindow = 16;

  Rng rng(0x51ab5eedULL);
  Matrix a(q.dim, q.dim);
  for (Index i = 0; i < q.dim; ++i)
    for (Index j = 0; j < q.dim; ++j) a(i, j) = rng.normal();
  double norm = a.norm();
  if (norm == 0.0) return 0.0;
  a /= norm;

  // The map is self-adjoint PSD on matrix space, so |image of the normalized
  // iterate| converges to the top eigenvalue = operator norm from below. The
  // polynomial x^n (1-x) flattens the spectrum near its peak, which makes the
  // convergence ratio close to 1; the stop therefore extrapolates the
  // remaining drift geometrically instead of waiting for it to vanish.
  double prev = -1.0;
  double window_drift = 0.0;
  double prev_window_drift = -1.0;
  int window_count = 0;
  for (long it = 0; it < kMaxIters; ++it) {
    const Matrix b = apply_poly(q, a, poly_n, with_residual_factor);
    const double bn = b.norm();
    if (bn <= 1e-300) return 0.0;  // map annihilates the iterate
    if (prev >= 0.0) {
      window_drift += std::abs(bn - prev);
      if (++window_count == kWindow) {
        const double scale = std::max(1.0, bn);
        if (window_drift <= 1e-12 * scale) return bn;
        if (prev_window_drift > 0.0 && window_drift < prev_window_drift) {
          const double ratio = window_drift / prev_window_drift;
          const double remaining = window_drift * ratio / (1.0 - ratio);
          if (remaining <= 1e-7 * scale) return bn;
        }
        prev_window_drift = window_drift;
        window_drift = 0.0;
        window_count = 0;
      }
    }
    prev = bn;
    a = b / bn;
  }
  // Cap reached. Top eigenvalues closer than ~1e-4 relative leave the drift
  // stagnant forever while the estimate is already inside the cluster; only a
  // materially moving estimate counts as non-convergence.
  const double scale = std::max(1.0, prev);
  if (prev_window_drift > 0.0 && window_drift > 0.0 && window_drift < prev_window_drift) {
    const double ratio = window_drift / prev_window_drift;
    if (window_drift * ratio / (1.0 - ratio) <= 1e-3 * scale) return prev;
  }
  if (std::max(window_drift, prev_window_drift) <= 1e-6 * scale) return prev;
  std::ostringstream msg;
  msg << "q_operator_norm: power iteration did not settle after " << kMaxIters
      << " sweeps (last estimate " << prev << ")";
  throw convergence_error(msg.str(), prev, kMaxIters);
}

double q_operator_norm(const QOperator& q, int poly_n, bool with_residual_factor) {
  if (poly_n < 0) throw std::invalid_argument("q_operator_norm: n >= 0 required");
  // Exact eigenvalue route while the vectorized operator stays small.
  if (q.dim <= 8) return q_operator_norm_dense(q, poly_n, with_residual_factor);
  return q_operator_norm_power(q, poly_n, with_residual_factor);
}

namespace {

// Matrix of the vectorized map vec(A) -> vec(Q[A]) in column-major vec order.
Matrix dense_q_matrix(const QOperator& q) {
  const Index d = q.dim;
  const Index d2 = d * d;
  Matrix big = Matrix::Zero(d2, d2);
  Matrix basis = Matrix::Zero(d, d);
  for (Index col = 0; col < d2; ++col) {
    basis(col % d, col / d) = 1.0;
    const Matrix image = apply_q(q, basis);
    big.col(col) = Eigen::Map<const Vector>(image.data(), d2);
    basis(col % d, col / d) = 0.0;
  }
  return big;
}

}  // namespace

double q_operator_norm_dense(const QOperator& q, int poly_n, bool with_residual_factor) {
  if (poly_n < 0) throw std::invalid_argument("q_operator_norm_dense: n >= 0 required");
  const std::vector<double> eigs = q_spectrum_dense(q);
  double best = 0.0;
  for (double lam : eigs) {
    double v = std::pow(lam, poly_n);
    if (with_residual_factor) v *= 1.0 - lam;
    best = std::max(best, std::abs(v));
  }
  return best;
}

std::vector<double> q_spectrum_dense(const QOperator& q) {
  const Matrix big = dense_q_matrix(q);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (big + big.transpose()));
  if (es.info() != Eigen::Success)
    throw convergence_error("q_spectrum_dense: eigensolver failed", -1.0, -1);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

double q_row_projection_frobenius(const QOperator& q, const TaskCollection& c) {
  const Matrix x = stacked_matrix(c);
  const Matrix row_proj = row_space_projection(x);
  return apply_q(q, row_proj).norm();
}

double check_domination(const TaskCollection& c) {
  const QOperator q = build_q(c);
  const Matrix x = stacked_matrix(c);
  const Matrix row_proj = row_space_projection(x);
  const TaskStats s = stats(c);
  const double r2t = s.radius_R * s.radius_R * static_cast<double>(c.num_tasks());
  Matrix diff = row_proj - apply_q(q, row_proj);
  if (r2t > 0.0) diff -= (x.transpose() * x) / r2t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.transpose()));
  if (es.info() != Eigen::Success)
    throw convergence_error("check_domination: eigensolver failed", -1.0, -1);
  return es.eigenvalues().minCoeff();
}

SecondMomentReport second_moment_recursion_check(const TaskCollection& c,
                                                 OrderingPolicy policy, int k, int num_seeds,
                                                 std::uint64_t base_seed) {
  if (policy != OrderingPolicy::with_replacement)
    throw std::invalid_argument(
        "second_moment_recursion_check: Q-recursion holds for with-replacement orderings");
  if (k < 1 || num_seeds < 2)
    throw std::invalid_argument("second_moment_recursion_check: k >= 1, num_seeds >= 2 required");

  const QOperator q = build_q(c);
  const Index d = c.dim;

  // Exact second moments Q^t[w* w*^T], t = 0..k.
  std::vector<Matrix> exact;
  exact.reserve(static_cast<std::size_t>(k) + 1);
  exact.push_back(c.w_star * c.w_star.transpose());
  for (int t = 1; t <= k; ++t) exact.push_back(apply_q(q, exact.back()));

  // Monte-Carlo moments with entrywise variance accumulators.
  std::vector<Matrix> mc_sum(static_cast<std::size_t>(k) + 1, Matrix::Zero(d, d));
  std::vector<Matrix> mc_sum_sq(static_cast<std::size_t>(k) + 1, Matrix::Zero(d, d));
  const std::vector<TaskFactors> factors = factorize(c);

  for (int s = 0; s < num_seeds; ++s) {
    const Ordering o = sample_with_replacement(base_seed + static_cast<std::uint64_t>(s),
                                               c.num_tasks(), k);
    Vector z = -c.w_star;  // z_0 = w_0 - w* with w_0 = 0
    for (int t = 0; t <= k; ++t) {
      if (t > 0) {
        const int m = o.indices[static_cast<std::size_t>(t - 1)];
        z = z - factors[static_cast<std::size_t>(m)].row_proj * z;  // P_m z
      }
      const Matrix outer = z * z.transpose();
      mc_sum[static_cast<std::size_t>(t)] += outer;
      mc_sum_sq[static_cast<std::size_t>(t)] += outer.cwiseProduct(outer);
    }
  }

  SecondMomentReport report;
  const double n = static_cast<double>(num_seeds);
  for (int t = 0; t <= k; ++t) {
    const Matrix mean = mc_sum[static_cast<std::size_t>(t)] / n;
    const Matrix var =
        (mc_sum_sq[static_cast<std::size_t>(t)] / n - mean.cwiseProduct(mean)).cwiseMax(0.0);
    const double dev = (mean - exact[static_cast<std::size_t>(t)]).norm();
    const double env = 5.0 * std::sqrt(var.sum() / n) + 1e-10;
    report.deviation_frobenius.push_back(dev);
    report.envelope.push_back(env);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > env) report.pass = false;
  }
  return report;
}

std::vector<double> projection_trace_sequence(const TaskCollection& c, const Ordering& o) {
  if (o.T != c.num_tasks())
    throw std::invalid_argument("projection_trace_sequence: ordering T mismatch");
  const QOperator q = build_q(c);
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(o.k));
  Matrix b = Matrix::Identity(c.dim, c.dim) -
             q.projections[static_cast<std::size_t>(o.indices.front())];
  a.push_back(b.trace());
  for (int t = 1; t < o.k; ++t) {
    const Matrix& p = q.projections[static_cast<std::size_t>(o.indices[static_cast<std::size_t>(t)])];
    b = p * b * p;
    a.push_back(b.trace());
  }
  return a;
}

}  // namespace conreg
