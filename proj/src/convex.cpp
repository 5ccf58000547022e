#include "conreg/convex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conreg/errors.hpp"

namespace conreg {

namespace {

Vector project_halfspace(const Halfspace& h, const Vector& v) {
  const double slack = h.b - h.a.dot(v);
  if (slack <= 0.0) return v;
  return v + (slack / h.a.squaredNorm()) * h.a;
}

// Dykstra's alternating projections over a halfspace list.
Vector dykstra_halfspaces(const std::vector<Halfspace>& hs, const Vector& v, double tol,
                          long max_iterations) {
  const std::size_t n = hs.size();
  Vector x = v;
  std::vector<Vector> increments(n, Vector::Zero(v.size()));
  for (long sweep = 0; sweep < max_iterations; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vector target = x + increments[i];
      const Vector projected = project_halfspace(hs[i], target);
      increments[i] = target - projected;
      change += (projected - x).norm();
      x = projected;
    }
    if (change <= tol) {
      double worst = 0.0;
      for (const auto& h : hs) worst = std::max(worst, h.b - h.a.dot(x));
      if (worst <= 10.0 * std::max(tol, 1e-12)) return x;
    }
  }
  double worst = 0.0;
  for (const auto& h : hs) worst = std::max(worst, h.b - h.a.dot(x));
  std::ostringstream msg;
  msg << "polyhedron projection: Dykstra cap reached, worst constraint violation " << worst;
  throw convergence_error(msg.str(), worst, max_iterations);
}

}  // namespace

ConvexSet ConvexSet::affine(Matrix x, Vector y) {
  // Nonempty iff consistent; min_norm_solve throws otherwise.
  (void)min_norm_solve(x, y);
  AffineSolutionSet s;
  s.pinv_x = pinv(x);
  s.x = std::move(x);
  s.y = std::move(y);
  return ConvexSet(Kind(std::move(s)));
}

ConvexSet ConvexSet::halfspace(Vector a, double b) {
  if (a.squaredNorm() <= 0.0) throw std::invalid_argument("halfspace: zero normal");
  Halfspace h;
  h.a = std::move(a);
  h.b = b;
  return ConvexSet(Kind(std::move(h)));
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball: radius >= 0 required");
  BallSet s;
  s.center = std::move(center);
  s.radius = radius;
  return ConvexSet(Kind(std::move(s)));
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || (lo.array() > hi.array()).any())
    throw std::invalid_argument("box: requires lo <= hi componentwise");
  BoxSet s;
  s.lo = std::move(lo);
  s.hi = std::move(hi);
  return ConvexSet(Kind(std::move(s)));
}

ConvexSet ConvexSet::polyhedron(std::vector<Halfspace> halfspaces) {
  if (halfspaces.empty()) throw std::invalid_argument("polyhedron: empty halfspace list");
  for (const auto& h : halfspaces) {
    if (h.a.squaredNorm() <= 0.0) throw std::invalid_argument("polyhedron: zero normal");
  }
  HalfspacePolyhedron s;
  s.halfspaces = std::move(halfspaces);
  return ConvexSet(Kind(std::move(s)));
}

Index ConvexSet::dim() const {
  return std::visit(
      [](const auto& s) -> Index {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AffineSolutionSet>) return s.x.cols();
        if constexpr (std::is_same_v<S, Halfspace>) return s.a.size();
        if constexpr (std::is_same_v<S, BallSet>) return s.center.size();
        if constexpr (std::is_same_v<S, BoxSet>) return s.lo.size();
        if constexpr (std::is_same_v<S, HalfspacePolyhedron>) return s.halfspaces.front().a.size();
      },
      kind_);
}

Vector ConvexSet::project(const Vector& v) const {
  if (v.size() != dim()) throw std::invalid_argument("ConvexSet::project: dimension mismatch");
  return std::visit(
      [&](const auto& s) -> Vector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AffineSolutionSet>) {
          return v - s.pinv_x * (s.x * v - s.y);
        } else if constexpr (std::is_same_v<S, Halfspace>) {
          return project_halfspace(s, v);
        } else if constexpr (std::is_same_v<S, BallSet>) {
          const Vector offset = v - s.center;
          const double norm = offset.norm();
          if (norm <= s.radius) return v;
          if (norm == 0.0) return s.center;
          return s.center + (s.radius / norm) * offset;
        } else if constexpr (std::is_same_v<S, BoxSet>) {
          return v.cwiseMax(s.lo).cwiseMin(s.hi);
        } else {
          return dykstra_halfspaces(s.halfspaces, v, projection_tolerance, max_iterations);
        }
      },
      kind_);
}

double ConvexSet::distance(const Vector& v) const { return (v - project(v)).norm(); }

double ConvexSet::violation(const Vector& w) const {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, AffineSolutionSet>) {
          return (s.x * w - s.y).norm();
        } else if constexpr (std::is_same_v<S, Halfspace>) {
          return std::max(0.0, s.b - s.a.dot(w));
        } else if constexpr (std::is_same_v<S, BallSet>) {
          return std::max(0.0, (w - s.center).norm() - s.radius);
        } else if constexpr (std::is_same_v<S, BoxSet>) {
          return std::max(0.0, std::max((s.lo - w).maxCoeff(), (w - s.hi).maxCoeff()));
        } else {
          double worst = 0.0;
          for (const auto& h : s.halfspaces) worst = std::max(worst, h.b - h.a.dot(w));
          return std::max(0.0, worst);
        }
      },
      kind_);
}

Trajectory pocs_run(const std::vector<ConvexSet>& sets, const Vector& w0,
                    const Ordering& ordering) {
  if (ordering.T != static_cast<int>(sets.size()))
    throw std::invalid_argument("pocs_run: ordering.T does not match number of sets");
  Trajectory traj;
  traj.ordering = ordering;
  traj.learner_tag = LearnerTag::pocs;
  traj.iterates.reserve(static_cast<std::size_t>(ordering.k) + 1);
  traj.per_step_current_residual.reserve(static_cast<std::size_t>(ordering.k));
  traj.iterates.push_back(w0);
  for (int t = 0; t < ordering.k; ++t) {
    const auto& set = sets[static_cast<std::size_t>(ordering.indices[static_cast<std::size_t>(t)])];
    Vector next = set.project(traj.iterates.back());
    traj.per_step_current_residual.push_back(set.violation(next));
    traj.iterates.push_back(std::move(next));
  }
  return traj;
}

double pocs_residual(const std::vector<ConvexSet>& sets, const Vector& w) {
  double sum = 0.0;
  for (const auto& s : sets) {
    const double dist = s.distance(w);
    sum += dist * dist;
  }
  return sum / (2.0 * static_cast<double>(sets.size()));
}

double pocs_forgetting(const std::vector<ConvexSet>& sets, const Trajectory& traj, int k) {
  if (k < 1 || k > traj.steps()) throw std::out_of_range("pocs_forgetting: k outside range");
  const Vector& wk = traj.iterates[static_cast<std::size_t>(k)];
  double sum = 0.0;
  for (int t = 1; t <= k; ++t) {
    const auto& set =
        sets[static_cast<std::size_t>(traj.ordering.indices[static_cast<std::size_t>(t - 1)])];
    const double dist = set.distance(wk);
    sum += dist * dist;
  }
  return sum / (2.0 * static_cast<double>(k));
}

IntersectionResult project_intersection(const std::vector<ConvexSet>& sets, const Vector& v,
                                        double tol, long max_sweeps) {
  if (sets.empty()) throw std::invalid_argument("project_intersection: no sets");
  IntersectionResult res;
  Vector x = v;
  std::vector<Vector> increments(sets.size(), Vector::Zero(v.size()));
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Vector target = x + increments[i];
      const Vector projected = sets[i].project(target);
      increments[i] = target - projected;
      change += (projected - x).norm();
      x = projected;
    }
    res.sweeps = sweep + 1;
    if (change <= tol) break;
  }
  res.point = x;
  res.worst_violation = 0.0;
  for (const auto& s : sets) res.worst_violation = std::max(res.worst_violation, s.violation(x));
  res.feasible = res.worst_violation <= 1e-6;
  return res;
}

}  // namespace conreg
