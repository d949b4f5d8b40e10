#include "hyperot/wlinear.hpp"

#include "hyperot/bures.hpp"

namespace hyperot {

WLinearMap fit_w_linear(const PointCloud& source, const PointCloud& target) {
  if (!source.ball.same_ball(target.ball))
    throw DimensionError("fit_w_linear: clouds live on different balls");
  const WrappedGaussian gs = estimate_wrapped_gaussian(source);
  const WrappedGaussian gt = estimate_wrapped_gaussian(target);
  WLinearMap map;
  map.ball = source.ball;
  map.mu_src = gs.mu;
  map.mu_tgt = gt.mu;
  map.transport = bures_transport_matrix(gs.sigma, gt.sigma);
  return map;
}

Vector w_linear_apply(const WLinearMap& map, const Vector& x) {
  const Vector centered = mobius_add<double>(-map.mu_src, x, map.ball);
  const Vector moved = mobius_matrix_mul(map.transport, centered, map.ball);
  return mobius_add(map.mu_tgt, moved, map.ball);
}

Matrix w_linear_apply(const WLinearMap& map, const Matrix& points) {
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i)
    out.row(i) = w_linear_apply(map, Vector(points.row(i).transpose())).transpose();
  return out;
}

}  // namespace hyperot
