#ifndef HYPEROT_WLINEAR_HPP
#define HYPEROT_WLINEAR_HPP

// Closed-form transport between wrapped Gaussians: recenter at the
// source bias, apply the Bures matrix through the tangent space at the
// origin, translate to the target bias.

#include "hyperot/wrapped_gaussian.hpp"

namespace hyperot {

struct WLinearMap {
  Vector mu_src;
  Vector mu_tgt;
  Matrix transport;  // SPD, solves T sigma_src T = sigma_tgt
  BallParams ball;
};

// Estimates a wrapped Gaussian on each cloud and connects them by the
// Bures transport of the two tangent covariances.
WLinearMap fit_w_linear(const PointCloud& source, const PointCloud& target);

// mu_tgt (+) T^(x) ((-mu_src) (+) x).
Vector w_linear_apply(const WLinearMap& map, const Vector& x);
Matrix w_linear_apply(const WLinearMap& map, const Matrix& points);

}  // namespace hyperot

#endif  // HYPEROT_WLINEAR_HPP
