#include "hyperot/wrapped_gaussian.hpp"

#include <random>

#include "hyperot/barycenter.hpp"
#include "hyperot/bures.hpp"

namespace hyperot {

Vector wrap_tangent_two_step(const Vector& mu, const Vector& z, const BallParams& ball) {
  return mobius_add(mu, exp_map_origin(z, ball), ball);
}

Vector wrap_tangent_direct(const Vector& mu, const Vector& z, const BallParams& ball) {
  return exp_map(mu, parallel_transport_from_origin(z, mu, ball), ball);
}

PointCloud sample_wrapped_gaussian(const WrappedGaussian& g, Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample_wrapped_gaussian: n must be >= 1");
  require_spd(g.sigma, "sample_wrapped_gaussian: sigma");
  const Index d = g.mu.size();
  const Matrix chol = Matrix(g.sigma.llt().matrixL());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix points(n, d);
  Vector z(d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) z[k] = normal(rng);
    points.row(i) = wrap_tangent_two_step(g.mu, chol * z, g.ball).transpose();
  }
  return make_uniform_cloud(points, g.ball);
}

WrappedGaussian estimate_wrapped_gaussian(const PointCloud& cloud) {
  const Index n = cloud.size();
  const Index d = cloud.dim();
  if (n < d + 1)
    throw DimensionError("estimate_wrapped_gaussian: needs at least d + 1 samples");

  WrappedGaussian out;
  out.ball = cloud.ball;
  out.mu = gyromidpoint(cloud);

  Matrix tangent(n, d);
  const Vector neg_mu = -out.mu;
  for (Index i = 0; i < n; ++i) {
    const Vector centered = mobius_add(neg_mu, cloud.point(i), cloud.ball);
    tangent.row(i) = log_map_origin(centered, cloud.ball).transpose();
  }
  const Vector mean = tangent.colwise().mean();
  tangent.rowwise() -= mean.transpose();
  out.sigma = tangent.transpose() * tangent / double(n - 1);
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.sigma);
  if (eig.eigenvalues().minCoeff() < 1e-12)
    throw NumericalError("estimate_wrapped_gaussian: singular tangent covariance");
  return out;
}

}  // namespace hyperot
