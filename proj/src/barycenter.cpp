#include "hyperot/barycenter.hpp"

namespace hyperot {

BarycenterResult euclid_barycenter_map(const Matrix& plan, const Matrix& targets) {
  if (plan.cols() != targets.rows())
    throw DimensionError("barycenter: coupling has " + std::to_string(plan.cols()) +
                         " columns but " + std::to_string(targets.rows()) +
                         " target points were given");
  BarycenterResult out;
  out.projected.resize(plan.rows(), targets.cols());
  for (Index i = 0; i < plan.rows(); ++i) {
    const double mass = plan.row(i).sum();
    if (mass < 1e-15)
      throw NumericalError("barycenter: coupling row " + std::to_string(i) +
                           " carries no mass");
    out.projected.row(i) = plan.row(i) * targets / mass;
  }
  return out;
}

BarycenterResult gyrobarycenter_map(const Matrix& plan, const Matrix& targets,
                                    const BallParams& ball) {
  if (plan.cols() != targets.rows())
    throw DimensionError("gyrobarycenter: coupling has " + std::to_string(plan.cols()) +
                         " columns but " + std::to_string(targets.rows()) +
                         " target points were given");
  const Index nt = targets.rows();
  Vector gamma_sq(nt);
  for (Index j = 0; j < nt; ++j) {
    const Vector xj = targets.row(j).transpose();
    const double gamma = gamma_factor(xj, ball);
    gamma_sq[j] = gamma * gamma;
  }
  const Vector g = gamma_sq.array() - 0.5;

  BarycenterResult out;
  out.convention = ball.gamma_convention;
  out.projected.resize(plan.rows(), targets.cols());
  for (Index i = 0; i < plan.rows(); ++i) {
    const double denom = plan.row(i).dot(g);
    if (denom < 1e-15)
      throw NumericalError("gyrobarycenter: coupling row " + std::to_string(i) +
                           " has degenerate gamma-weighted mass");
    Vector pre = Vector::Zero(targets.cols());
    for (Index j = 0; j < nt; ++j)
      pre += plan(i, j) * gamma_sq[j] * targets.row(j).transpose();
    pre /= denom;
    out.projected.row(i) = mobius_scalar_mul(0.5, pre, ball).transpose();
  }
  return out;
}

BarycenterResult gyrobarycenter_map(const Matrix& plan, const PointCloud& targets) {
  return gyrobarycenter_map(plan, targets.points, targets.ball);
}

Vector gyromidpoint(const Matrix& points, const BallParams& ball) {
  if (points.rows() == 0) throw DimensionError("gyromidpoint: empty input");
  const Matrix plan = Matrix::Constant(1, points.rows(), 1.0 / double(points.rows()));
  return gyrobarycenter_map(plan, points, ball).projected.row(0).transpose();
}

Vector gyromidpoint(const PointCloud& cloud) {
  return gyromidpoint(cloud.points, cloud.ball);
}

}  // namespace hyperot
