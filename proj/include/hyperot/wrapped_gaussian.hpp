#ifndef HYPEROT_WRAPPED_GAUSSIAN_HPP
#define HYPEROT_WRAPPED_GAUSSIAN_HPP

// Wrapped Gaussians on the ball: push a zero-mean Gaussian through the
// exponential map at the origin, then translate by a ball-valued bias.

#include <cstdint>

#include "hyperot/cloud.hpp"

namespace hyperot {

struct WrappedGaussian {
  Vector mu;          // bias point on the ball
  Matrix sigma;       // d x d SPD covariance in the tangent space at 0
  BallParams ball;
};

// The construction written as two steps: mu (+) Exp_0(z).
Vector wrap_tangent_two_step(const Vector& mu, const Vector& z, const BallParams& ball);

// The same construction written as a single exponential: Exp_mu applied
// to the origin tangent vector carried to mu by parallel transport.
// Agrees with the two-step form identically.
Vector wrap_tangent_direct(const Vector& mu, const Vector& z, const BallParams& ball);

// n samples, uniform weights. Deterministic for a fixed seed within a
// build. Throws on non-SPD sigma.
PointCloud sample_wrapped_gaussian(const WrappedGaussian& g, Index n, std::uint64_t seed);

// mu = gyromidpoint of the cloud; sigma = sample covariance of
// Log_0((-mu) (+) x_i). Needs n >= d + 1; throws when the recentred
// samples have singular covariance.
WrappedGaussian estimate_wrapped_gaussian(const PointCloud& cloud);

}  // namespace hyperot

#endif  // HYPEROT_WRAPPED_GAUSSIAN_HPP
