#include "conreg/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace conreg {

std::string to_string(TheoremTag tag) {
  switch (tag) {
    case TheoremTag::param_dep_wr: return "param_dep_wr";
    case TheoremTag::universal_wr: return "universal_wr";
    case TheoremTag::wor: return "wor";
    case TheoremTag::sgd_last: return "sgd_last";
    case TheoremTag::sgd_wor: return "sgd_wor";
    case TheoremTag::pocs: return "pocs";
    case TheoremTag::classification: return "classification";
  }
  return "unknown";
}

TheoremTag theorem_tag_from_string(const std::string& s) {
  if (s == "param_dep_wr") return TheoremTag::param_dep_wr;
  if (s == "universal_wr") return TheoremTag::universal_wr;
  if (s == "wor") return TheoremTag::wor;
  if (s == "sgd_last") return TheoremTag::sgd_last;
  if (s == "sgd_wor") return TheoremTag::sgd_wor;
  if (s == "pocs") return TheoremTag::pocs;
  if (s == "classification") return TheoremTag::classification;
  throw std::invalid_argument("unknown theorem tag: " + s);
}

namespace {

const double kE = std::exp(1.0);

double scale_term(double w_star_norm, double R) {
  return w_star_norm * w_star_norm * R * R;
}

double fourth_root(double x) { return std::pow(x, 0.25); }

// min(sqrt(d - r_bar), sqrt(T r_bar)) with the d - r_bar arm floored at zero
// against rank-estimation noise.
double min_rank_term(const TaskStats& s) {
  const double dim_gap = std::max(0.0, static_cast<double>(s.dim_d) - s.avg_rank);
  return std::min(std::sqrt(dim_gap),
                  std::sqrt(static_cast<double>(s.num_tasks_T) * s.avg_rank));
}

void check_sgd_range(double eta, double beta, long T, const char* op) {
  if (!(beta > 0.0)) throw std::invalid_argument(std::string(op) + ": beta > 0 required");
  if (!(eta > 0.0) || !(eta < 2.0 / beta))
    throw std::invalid_argument(std::string(op) + ": step size outside guaranteed range");
  if (T < 1) throw std::out_of_range(std::string(op) + ": T >= 1 required");
}

void fill_instance_inputs(BoundReport& r, const TaskStats& s) {
  r.inputs.w_star_norm = s.w_star_norm;
  r.inputs.radius_R = s.radius_R;
  r.inputs.d = static_cast<double>(s.dim_d);
  r.inputs.T = static_cast<double>(s.num_tasks_T);
  r.inputs.r_bar = s.avg_rank;
}

}  // namespace

BoundReport bound_param_dep_wr(const TaskStats& s, long k) {
  if (k < 3) throw std::out_of_range("bound_param_dep_wr: k >= 3 required");
  BoundReport r;
  r.theorem_tag = TheoremTag::param_dep_wr;
  r.k = k;
  fill_instance_inputs(r, s);

  const double min_term = min_rank_term(s);
  const double scale = scale_term(s.w_star_norm, s.radius_R);
  const double norm_loss = min_term / (2.0 * kE * static_cast<double>(k - 1));
  const double norm_forget = 3.0 * min_term / (2.0 * static_cast<double>(k - 2));
  r.loss_bound = norm_loss * scale;
  r.forgetting_bound = norm_forget * scale;
  r.normalized_loss_bound = norm_loss;
  r.normalized_forgetting_bound = norm_forget;
  return r;
}

BoundReport bound_universal_wr(double w_star_norm, double R, long k) {
  if (k < 2) throw std::out_of_range("bound_universal_wr: k >= 2 required");
  BoundReport r;
  r.theorem_tag = TheoremTag::universal_wr;
  r.k = k;
  r.inputs.w_star_norm = w_star_norm;
  r.inputs.radius_R = R;
  const double scale = scale_term(w_star_norm, R);
  const double norm_loss = 2.0 / fourth_root(static_cast<double>(k));
  const double norm_forget = 5.0 / fourth_root(static_cast<double>(k - 1));
  r.loss_bound = norm_loss * scale;
  r.forgetting_bound = norm_forget * scale;
  r.normalized_loss_bound = norm_loss;
  r.normalized_forgetting_bound = norm_forget;
  return r;
}

BoundReport bound_wor(const TaskStats& s, long k) {
  if (k < 2 || k > static_cast<long>(s.num_tasks_T))
    throw std::out_of_range("bound_wor: 2 <= k <= T required");
  BoundReport r;
  r.theorem_tag = TheoremTag::wor;
  r.k = k;
  fill_instance_inputs(r, s);

  const double dim_gap = std::max(0.0, static_cast<double>(s.dim_d) - s.avg_rank);
  const double norm_bound = std::min(7.0 / fourth_root(static_cast<double>(k - 1)),
                                     (dim_gap + 1.0) / static_cast<double>(k - 1));
  const double scale = scale_term(s.w_star_norm, s.radius_R);
  r.loss_bound = norm_bound * scale;
  r.forgetting_bound = norm_bound * scale;
  r.normalized_loss_bound = norm_bound;
  r.normalized_forgetting_bound = norm_bound;
  return r;
}

double bound_sgd_last(double eta, double beta, double D, long T) {
  check_sgd_range(eta, beta, T, "bound_sgd_last");
  const double exponent = 1.0 - eta * beta * (1.0 - eta * beta / 4.0);
  return kE * D * D /
         (2.0 * eta * (2.0 - eta * beta) * std::pow(static_cast<double>(T), exponent));
}

double bound_sgd_wor(double eta, double beta, double D, long T) {
  if (T < 2) throw std::out_of_range("bound_sgd_wor: T >= 2 required");
  check_sgd_range(eta, beta, T, "bound_sgd_wor");
  const double exponent = 1.0 - eta * beta * (1.0 - eta * beta / 4.0);
  return kE * D * D / (eta * (2.0 - eta * beta) * std::pow(static_cast<double>(T), exponent)) +
         4.0 * beta * beta * eta * D * D / static_cast<double>(T);
}

double bound_pocs(long k, double d0_sq) {
  if (k < 1) throw std::out_of_range("bound_pocs: k >= 1 required");
  if (d0_sq < 0.0) throw std::invalid_argument("bound_pocs: d0_sq >= 0 required");
  return 7.0 * d0_sq / fourth_root(static_cast<double>(k));
}

double bound_classification(long k, double w_star_norm, double R) {
  if (k < 1) throw std::out_of_range("bound_classification: k >= 1 required");
  return 7.0 * scale_term(w_star_norm, R) / fourth_root(static_cast<double>(k));
}

}  // namespace conreg
