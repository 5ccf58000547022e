#include "conreg/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "conreg/errors.hpp"
#include "conreg/rng.hpp"

namespace conreg {

namespace {

Vector gaussian_vector(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

int sample_in_range(Rng& rng, std::pair<int, int> range) {
  if (range.first > range.second) std::swap(range.first, range.second);
  const int span = range.second - range.first + 1;
  return range.first + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(span)));
}

}  // namespace

Matrix stacked_matrix(const TaskCollection& c) {
  Index total = 0;
  for (const auto& t : c.tasks) total += t.x.rows();
  Matrix x(total, c.dim);
  Index row = 0;
  for (const auto& t : c.tasks) {
    x.middleRows(row, t.x.rows()) = t.x;
    row += t.x.rows();
  }
  return x;
}

Vector stacked_rhs(const TaskCollection& c) {
  Index total = 0;
  for (const auto& t : c.tasks) total += t.y.size();
  Vector y(total);
  Index row = 0;
  for (const auto& t : c.tasks) {
    y.segment(row, t.y.size()) = t.y;
    row += t.y.size();
  }
  return y;
}

TaskCollection build_collection(std::vector<Task> tasks) {
  if (tasks.empty()) throw std::invalid_argument("build_collection: empty task list");
  const Index d = tasks.front().x.cols();
  for (const auto& t : tasks) {
    if (t.x.cols() != d) throw std::invalid_argument("build_collection: column dimension mismatch");
    if (t.x.rows() != t.y.size())
      throw std::invalid_argument("build_collection: rows of X and length of y disagree");
    if (t.x.rows() < 1) throw std::invalid_argument("build_collection: task with no rows");
    if (!t.x.allFinite() || !t.y.allFinite())
      throw std::invalid_argument("build_collection: non-finite task data");
  }

  TaskCollection c;
  c.tasks = std::move(tasks);
  c.dim = d;

  const Matrix x = stacked_matrix(c);
  const Vector y = stacked_rhs(c);
  // min_norm_solve throws not_realizable_error on inconsistent systems.
  c.w_star = min_norm_solve(x, y);

  double max_residual = 0.0;
  double max_y_norm = 0.0;
  for (const auto& t : c.tasks) {
    max_residual = std::max(max_residual, (t.x * c.w_star - t.y).norm());
    max_y_norm = std::max(max_y_norm, t.y.norm());
  }
  c.realizability_residual = max_residual;
  if (max_residual > 1e-8 * (1.0 + max_y_norm)) {
    std::ostringstream msg;
    msg << "build_collection: not jointly realizable, residual " << max_residual;
    throw not_realizable_error(msg.str(), max_residual);
  }
  return c;
}

TaskCollection gen_random_realizable(std::uint64_t seed, int T, int d,
                                     std::pair<int, int> rank_range,
                                     std::pair<int, int> row_range,
                                     double scale) {
  if (T < 1 || d < 1) throw std::invalid_argument("gen_random_realizable: T >= 1, d >= 1 required");
  Rng rng(seed);
  const Vector ground_truth = gaussian_vector(rng, d);

  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(T));
  for (int m = 0; m < T; ++m) {
    const int rank = sample_in_range(rng, rank_range);
    int rows = sample_in_range(rng, row_range);
    rows = std::max(rows, rank);
    if (rank < 1 || rank > std::min(rows, d)) {
      throw std::invalid_argument("gen_random_realizable: infeasible rank/row combination");
    }
    // Product of Gaussian factors has the requested rank almost surely.
    const Matrix x = scale * (gaussian_matrix(rng, rows, rank) * gaussian_matrix(rng, rank, d));
    Task t;
    t.x = x;
    t.y = x * ground_truth;
    tasks.push_back(std::move(t));
  }
  return build_collection(std::move(tasks));
}

TaskCollection gen_two_task_clone(std::uint64_t seed, int T, int d, double angle_eps) {
  if (d < 2) throw std::invalid_argument("gen_two_task_clone: d >= 2 required");
  if (T < 2) throw std::invalid_argument("gen_two_task_clone: T >= 2 required");
  if (!(angle_eps > 0.0) || !(angle_eps <= M_PI / 2.0))
    throw std::invalid_argument("gen_two_task_clone: angle_eps in (0, pi/2] required");

  Rng rng(seed);
  // Random orthonormal pair spanning the active plane.
  Vector q1 = gaussian_vector(rng, d);
  q1.normalize();
  Vector g = gaussian_vector(rng, d);
  Vector q2 = g - q1.dot(g) * q1;
  q2.normalize();

  const Vector dir_a = q1;
  const Vector dir_b = std::cos(angle_eps) * q1 + std::sin(angle_eps) * q2;
  // Ground truth with generic components in the active plane.
  const Vector u = (1.0 + rng.next_double()) * q1 + (1.0 + rng.next_double()) * q2;

  const int copies_a = T - T / 2;  // odd T: first direction gets the extra copy
  std::vector<Task> tasks;
  tasks.reserve(static_cast<std::size_t>(T));
  for (int m = 0; m < T; ++m) {
    const Vector& dir = m < copies_a ? dir_a : dir_b;
    Task t;
    t.x = dir.transpose();
    t.y = Vector::Constant(1, dir.dot(u));
    tasks.push_back(std::move(t));
  }
  return build_collection(std::move(tasks));
}

TaskStats stats(const TaskCollection& c) {
  TaskStats s;
  s.dim_d = c.dim;
  s.num_tasks_T = static_cast<Index>(c.tasks.size());
  s.w_star_norm = c.w_star.norm();
  double rank_sum = 0.0;
  for (const auto& t : c.tasks) {
    const SvdFactors f = svd(t.x);
    s.radius_R = std::max(s.radius_R, f.sigma.size() > 0 ? f.sigma(0) : 0.0);
    rank_sum += static_cast<double>(f.numerical_rank);
    s.max_rank = std::max(s.max_rank, f.numerical_rank);
    s.total_rows_N += t.x.rows();
  }
  s.avg_rank = rank_sum / static_cast<double>(c.tasks.size());
  return s;
}

TaskCollection normalize_collection(const TaskCollection& c) {
  const TaskStats s = stats(c);
  if (s.radius_R <= 0.0 || s.w_star_norm <= 0.0) return c;
  std::vector<Task> tasks;
  tasks.reserve(c.tasks.size());
  for (const auto& t : c.tasks) {
    Task nt;
    nt.x = t.x / s.radius_R;
    nt.y = t.y / (s.radius_R * s.w_star_norm);
    tasks.push_back(std::move(nt));
  }
  return build_collection(std::move(tasks));
}

void save_collection(const TaskCollection& c, std::ostream& out) {
  nlohmann::json j;
  j["dim"] = c.dim;
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : c.tasks) {
    nlohmann::json jt;
    jt["rows"] = t.x.rows();
    jt["cols"] = t.x.cols();
    std::vector<double> x_entries(static_cast<std::size_t>(t.x.size()));
    for (Index i = 0; i < t.x.rows(); ++i)
      for (Index jcol = 0; jcol < t.x.cols(); ++jcol)
        x_entries[static_cast<std::size_t>(i * t.x.cols() + jcol)] = t.x(i, jcol);
    jt["x_entries"] = x_entries;
    jt["y_entries"] = std::vector<double>(t.y.data(), t.y.data() + t.y.size());
    j["tasks"].push_back(std::move(jt));
  }
  out << j.dump(2) << "\n";
}

TaskCollection load_collection(std::istream& in) {
  nlohmann::json j;
  in >> j;
  const Index d = j.at("dim").get<Index>();
  std::vector<Task> tasks;
  for (const auto& jt : j.at("tasks")) {
    const Index rows = jt.at("rows").get<Index>();
    const Index cols = jt.at("cols").get<Index>();
    if (cols != d) throw config_error("fixture: task cols disagree with dim");
    const auto x_entries = jt.at("x_entries").get<std::vector<double>>();
    const auto y_entries = jt.at("y_entries").get<std::vector<double>>();
    if (static_cast<Index>(x_entries.size()) != rows * cols)
      throw config_error("fixture: x_entries length mismatch");
    if (static_cast<Index>(y_entries.size()) != rows)
      throw config_error("fixture: y_entries length mismatch");
    Task t;
    t.x.resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index jcol = 0; jcol < cols; ++jcol)
        t.x(i, jcol) = x_entries[static_cast<std::size_t>(i * cols + jcol)];
    t.y = Eigen::Map<const Vector>(y_entries.data(), rows);
    tasks.push_back(std::move(t));
  }
  return build_collection(std::move(tasks));
}

void save_collection_file(const TaskCollection& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  save_collection(c, out);
}

TaskCollection load_collection_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open for reading: " + path);
  return load_collection(in);
}

}  // namespace conreg
