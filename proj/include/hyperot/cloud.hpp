#ifndef HYPEROT_CLOUD_HPP
#define HYPEROT_CLOUD_HPP

#include <string>

#include <Eigen/Dense>

#include "hyperot/ball.hpp"
#include "hyperot/errors.hpp"

namespace hyperot {

// n points stored as rows, with weights on the probability simplex.
struct PointCloud {
  Matrix points;    // n x d, every row strictly inside the ball
  Vector weights;   // n, nonnegative, sums to 1
  BallParams ball;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  Vector point(Index i) const { return points.row(i).transpose(); }
};

// Builds a cloud with uniform weights, clamping each row into the ball.
inline PointCloud make_uniform_cloud(const Matrix& points, const BallParams& ball) {
  PointCloud cloud;
  cloud.points = points;
  for (Index i = 0; i < points.rows(); ++i) {
    Vector row = points.row(i).transpose();
    cloud.points.row(i) = clamp_to_ball(row, ball).transpose();
  }
  cloud.weights = Vector::Constant(points.rows(), 1.0 / double(points.rows()));
  cloud.ball = ball;
  return cloud;
}

// Checks the cloud invariants; throws with the offending row on failure.
inline void validate_cloud(const PointCloud& cloud, double weight_tol = 1e-12) {
  if (cloud.points.rows() != cloud.weights.size())
    throw DimensionError("cloud: weight count does not match point count");
  for (Index i = 0; i < cloud.size(); ++i) {
    if (!cloud.points.row(i).allFinite())
      throw NumericalError("cloud: row " + std::to_string(i) + " is not finite");
    if (cloud.points.row(i).norm() >= cloud.ball.radius)
      throw NumericalError("cloud: row " + std::to_string(i) + " lies outside the ball");
    if (cloud.weights[i] < 0.0)
      throw NumericalError("cloud: negative weight at row " + std::to_string(i));
  }
  if (std::abs(cloud.weights.sum() - 1.0) > weight_tol)
    throw NumericalError("cloud: weights do not sum to 1");
}

}  // namespace hyperot

#endif  // HYPEROT_CLOUD_HPP
