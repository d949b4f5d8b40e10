#ifndef HYPEROT_HNN_HPP
#define HYPEROT_HNN_HPP

// Hyperbolic linear layers: b (+) (W (x) x), stacked with nonlinearities
// wrapped through the tangent space at the origin. On the flat manifold
// the same structures are ordinary affine layers.

#include <vector>

#include "hyperot/manifold.hpp"

namespace hyperot {

enum class Nonlinearity { relu, tanh, none };

struct LinearLayer {
  Matrix W;  // d_out x d_in
  Vector b;  // d_out, a point on the output ball
};

struct Model {
  std::vector<LinearLayer> layers;
  Nonlinearity nonlinearity = Nonlinearity::none;
  bool use_bias = true;  // disabled for the bias-free analysis mode
};

// Checks consecutive layer dimensions; throws on mismatch.
void validate_model(const Model& model);

// sigma applied through the tangent space: Exp_0(sigma(Log_0(h))).
Vector wrapped_nonlinearity(const Manifold& manifold, Nonlinearity kind, const Vector& h);

// One layer: b (+) (W (x) x) (bias skipped when the model says so).
Vector layer_forward(const Manifold& manifold, const LinearLayer& layer,
                     const Vector& x, bool use_bias = true);

// Full pass; the nonlinearity sits between layers, not after the last.
Vector model_forward(const Manifold& manifold, const Model& model, const Vector& x);
Matrix model_forward(const Manifold& manifold, const Model& model, const Matrix& points);

// Glorot-style uniform weights, zero biases.
Model make_model(const std::vector<Index>& dims, Nonlinearity nonlinearity,
                 std::uint64_t seed, bool use_bias = true);

}  // namespace hyperot

#endif  // HYPEROT_HNN_HPP
