#pragma once

#include <cstdint>
#include <vector>

#include "conreg/linalg.hpp"
#include "conreg/ordering.hpp"
#include "conreg/tasks.hpp"

namespace conreg {

// The linear map Q[A] = (1/T) sum_m P_m A P_m on d x d matrices, where
// P_m = I - X_m^+ X_m. Self-adjoint under the Frobenius inner product with
// spectrum in [0, 1]; it propagates the second moment of the error under
// with-replacement Kaczmarz updates.
struct QOperator {
  std::vector<Matrix> projections;  // P_m, symmetric idempotent
  Index dim = 0;
  int T = 0;
};

QOperator build_q(const TaskCollection& c);

Matrix apply_q(const QOperator& q, const Matrix& a);

// Repeated application Q^n[A].
Matrix apply_q_power(const QOperator& q, Matrix a, int n);

// Operator norm of Q^n (or Q^n (I - Q) when with_residual_factor) over the
// d^2-dimensional matrix space. Dispatches to the exact dense eigenvalue
// route for d <= 8 and to seeded power iteration above that.
double q_operator_norm(const QOperator& q, int poly_n, bool with_residual_factor);

// Power iteration on the self-adjoint map, deterministic seeded start.
// Underestimates the true norm slightly on near-degenerate spectra.
double q_operator_norm_power(const QOperator& q, int poly_n, bool with_residual_factor);

// Dense oracle: materializes the d^2 x d^2 matrix of Q and reads the norm off
// its eigenvalues. Intended for small d (it allocates d^4 doubles).
double q_operator_norm_dense(const QOperator& q, int poly_n, bool with_residual_factor);

// Eigenvalues of the vectorized Q (ascending). Small-d diagnostic.
std::vector<double> q_spectrum_dense(const QOperator& q);

// |Q[X^+X]|_F for the stacked matrix X; bounded by min(sqrt(T r_bar), sqrt(d - r_bar)).
double q_row_projection_frobenius(const QOperator& q, const TaskCollection& c);

// Smallest eigenvalue of (X^+X - Q[X^+X] - (1/(R^2 T)) X^T X); the PSD
// domination holds when this is >= -1e-8.
double check_domination(const TaskCollection& c);

struct SecondMomentReport {
  std::vector<double> deviation_frobenius;  // per t: |MC estimate - Q^t[w* w*^T]|_F
  std::vector<double> envelope;             // per t: 5 * SE-based allowance
  double max_deviation = 0.0;
  bool pass = true;
};

// Monte-Carlo check of E[z_t z_t^T] = Q^t[w* w*^T] under with-replacement
// orderings (z_t = w_t - w*). Matched seeds base_seed..base_seed+num_seeds-1.
SecondMomentReport second_moment_recursion_check(const TaskCollection& c,
                                                 OrderingPolicy policy, int k, int num_seeds,
                                                 std::uint64_t base_seed);

// Realized trace sequence a_t = tr(P_tau(t)..P_tau(2) (I - P_tau(1)) P_tau(2)..P_tau(t)),
// t = 1..k. Non-increasing pathwise under any ordering policy.
std::vector<double> projection_trace_sequence(const TaskCollection& c, const Ordering& o);

}  // namespace conreg
