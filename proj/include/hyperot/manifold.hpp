#ifndef HYPEROT_MANIFOLD_HPP
#define HYPEROT_MANIFOLD_HPP

// Geometry switch for the estimators. The alignment pipelines (OT-DA,
// mapping estimation, OT-direct) are identical in the ball and in flat
// space up to a handful of primitives; this struct supplies them so the
// Euclidean baselines share the solvers.

#include "hyperot/barycenter.hpp"
#include "hyperot/cloud.hpp"
#include "hyperot/cost.hpp"

namespace hyperot {

struct Manifold {
  enum class Kind { ball, flat };
  Kind kind = Kind::ball;
  BallParams params;

  static Manifold poincare(const BallParams& b) { return {Kind::ball, b}; }
  static Manifold euclidean() { return {Kind::flat, BallParams{}}; }

  bool hyperbolic() const { return kind == Kind::ball; }

  double distance(const Vector& x, const Vector& y) const {
    return hyperbolic() ? hyperot::distance(x, y, params) : (x - y).norm();
  }

  Vector add(const Vector& x, const Vector& y) const {
    return hyperbolic() ? mobius_add(x, y, params) : Vector(x + y);
  }

  Vector matvec(const Matrix& Q, const Vector& x) const {
    return hyperbolic() ? mobius_matrix_mul(Q, x, params) : Vector(Q * x);
  }

  Vector exp0(const Vector& v) const {
    return hyperbolic() ? exp_map_origin(v, params) : v;
  }

  Vector log0(const Vector& y) const {
    return hyperbolic() ? log_map_origin(y, params) : y;
  }

  Vector exp_at(const Vector& x, const Vector& v) const {
    return hyperbolic() ? exp_map(x, v, params) : Vector(x + v);
  }

  // Conformal factor of the metric (1 in flat space).
  double lambda(const Vector& x) const {
    return hyperbolic() ? conformal_factor(x, params) : 1.0;
  }

  Vector clamp(const Vector& x) const {
    return hyperbolic() ? clamp_to_ball(x, params) : x;
  }

  // Barycentric projection of a coupling onto the target points.
  Matrix barycenter(const Matrix& plan, const Matrix& targets) const {
    return hyperbolic() ? gyrobarycenter_map(plan, targets, params).projected
                        : euclid_barycenter_map(plan, targets).projected;
  }

  CostKind default_cost() const {
    return hyperbolic() ? CostKind::sq_hyperbolic : CostKind::sq_euclidean;
  }
};

}  // namespace hyperot

#endif  // HYPEROT_MANIFOLD_HPP
