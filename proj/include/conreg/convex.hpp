#pragma once

#include <string>
#include <variant>
#include <vector>

#include "conreg/learners.hpp"
#include "conreg/linalg.hpp"
#include "conreg/ordering.hpp"

namespace conreg {

// a . w >= b
struct Halfspace {
  Vector a;
  double b = 0.0;
};

// Solution set {w : X w = y} of a consistent linear system.
struct AffineSolutionSet {
  Matrix x;
  Vector y;
  Matrix pinv_x;  // cached at construction
};

struct BallSet {
  Vector center;
  double radius = 0.0;
};

struct BoxSet {
  Vector lo;
  Vector hi;
};

struct HalfspacePolyhedron {
  std::vector<Halfspace> halfspaces;
};

// A projectable closed convex set. Affine, halfspace, ball and box project in
// closed form; polyhedra use Dykstra's algorithm over their halfspace list
// (plain cyclic projection finds a feasible point, not the nearest one).
class ConvexSet {
 public:
  using Kind = std::variant<AffineSolutionSet, Halfspace, BallSet, BoxSet, HalfspacePolyhedron>;

  static ConvexSet affine(Matrix x, Vector y);  // checks consistency (nonempty)
  static ConvexSet halfspace(Vector a, double b);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet polyhedron(std::vector<Halfspace> halfspaces);

  Vector project(const Vector& v) const;
  double distance(const Vector& v) const;
  // Worst constraint violation at w (<= 0 means feasible); exact for all kinds.
  double violation(const Vector& w) const;
  Index dim() const;

  double projection_tolerance = 1e-9;
  long max_iterations = 100000;

  const Kind& kind() const { return kind_; }

 private:
  explicit ConvexSet(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

// POCS: w_t = Pi_tau(t)(w_{t-1}).
Trajectory pocs_run(const std::vector<ConvexSet>& sets, const Vector& w0, const Ordering& ordering);

// (1/2T) sum_m dist^2(w, C_m).
double pocs_residual(const std::vector<ConvexSet>& sets, const Vector& w);

// (1/2k) sum_{t=1..k} |w_k - Pi_tau(t)(w_k)|^2 over the realized ordering.
double pocs_forgetting(const std::vector<ConvexSet>& sets, const Trajectory& traj, int k);

// Dykstra over the whole set list: converges to the nearest point of the
// intersection. Used for feasibility certificates and d0 = dist(w0, C*).
struct IntersectionResult {
  Vector point;
  double worst_violation = 0.0;
  bool feasible = false;
  long sweeps = 0;
};

IntersectionResult project_intersection(const std::vector<ConvexSet>& sets, const Vector& v,
                                        double tol = 1e-10, long max_sweeps = 200000);

}  // namespace conreg
