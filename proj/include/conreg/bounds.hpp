#pragma once

#include <limits>
#include <optional>
#include <string>

#include "conreg/tasks.hpp"

namespace conreg {

enum class TheoremTag { param_dep_wr, universal_wr, wor, sgd_last, sgd_wor, pocs, classification };

std::string to_string(TheoremTag tag);
TheoremTag theorem_tag_from_string(const std::string& s);

// Instance quantities a bound was evaluated from (NaN where not applicable).
struct BoundInputs {
  double w_star_norm = std::numeric_limits<double>::quiet_NaN();
  double radius_R = std::numeric_limits<double>::quiet_NaN();
  double d = std::numeric_limits<double>::quiet_NaN();
  double T = std::numeric_limits<double>::quiet_NaN();
  double r_bar = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double D = std::numeric_limits<double>::quiet_NaN();
};

struct BoundReport {
  TheoremTag theorem_tag = TheoremTag::universal_wr;
  long k = 0;
  std::optional<double> loss_bound;
  std::optional<double> forgetting_bound;
  // Same bounds divided by the |w*|^2 R^2 scale term (table-style comparison).
  std::optional<double> normalized_loss_bound;
  std::optional<double> normalized_forgetting_bound;
  BoundInputs inputs;
};

// With-replacement, parameter dependent (valid for k >= 3):
//   loss <= min(sqrt(d - r_bar), sqrt(T r_bar)) |w*|^2 R^2 / (2e (k-1))
//   forgetting <= 3 min(...) |w*|^2 R^2 / (2 (k-2))
BoundReport bound_param_dep_wr(const TaskStats& s, long k);

// With-replacement, universal (k >= 2):
//   loss <= 2 |w*|^2 R^2 / k^{1/4},  forgetting <= 5 |w*|^2 R^2 / (k-1)^{1/4}
BoundReport bound_universal_wr(double w_star_norm, double R, long k);

// Without replacement (2 <= k <= T): both bounds
//   min(7 / (k-1)^{1/4}, (d - r_bar + 1) / (k-1)) |w*|^2 R^2
BoundReport bound_wor(const TaskStats& s, long k);

// Last-iterate with-replacement SGD: e D^2 / (2 eta (2 - eta beta) T^{1 - eta beta (1 - eta beta / 4)}).
double bound_sgd_last(double eta, double beta, double D, long T);

// Without-replacement SGD (T >= 2):
//   e D^2 / (eta (2 - eta beta) T^{1 - eta beta (1 - eta beta / 4)}) + 4 beta^2 eta D^2 / T
double bound_sgd_wor(double eta, double beta, double D, long T);

// POCS residual (k >= 1): 7 d0_sq / k^{1/4}, d0_sq the squared distance of w_0
// to the set intersection.
double bound_pocs(long k, double d0_sq);

// Weakly-regularized continual classification (k >= 1): 7 |w*|^2 R^2 / k^{1/4}.
double bound_classification(long k, double w_star_norm, double R);

}  // namespace conreg
