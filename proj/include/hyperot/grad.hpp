#ifndef HYPEROT_GRAD_HPP
#define HYPEROT_GRAD_HPP

// Closed-form gradients for the Mobius operations and the losses built
// from them. Everything here works in ambient (Euclidean) coordinates;
// riemannian_grad converts at the very end. Each vector-Jacobian
// product is verified against central finite differences in the tests.

#include "hyperot/hnn.hpp"

namespace hyperot {

// lambda_x^{-2} * euclid_grad: the inverse-metric scaling that turns an
// ambient gradient into the Riemannian one.
Vector riemannian_grad(const Vector& euclid_grad, const Vector& x, const BallParams& ball);

// Ambient gradients of d(x, y) with respect to each argument; zero at
// coincident points (the distance is not differentiable there).
std::pair<Vector, Vector> grad_distance(const Manifold& manifold, const Vector& x,
                                        const Vector& y);

// vbar^T d(x (+) y) -> (xbar, ybar).
std::pair<Vector, Vector> vjp_mobius_add(const Vector& x, const Vector& y,
                                         const Vector& vbar, const BallParams& ball);

// vbar^T d(Q (x) x) -> (Qbar, xbar).
std::pair<Matrix, Vector> vjp_mobius_matvec(const Matrix& Q, const Vector& x,
                                            const Vector& vbar, const BallParams& ball);

// vbar^T d(r (x) q) -> qbar (r fixed).
Vector vjp_mobius_scalar_mul(double r, const Vector& q, const Vector& vbar,
                             const BallParams& ball);

Vector vjp_exp_origin(const Vector& v, const Vector& vbar, const BallParams& ball);
Vector vjp_log_origin(const Vector& y, const Vector& vbar, const BallParams& ball);

// Parameter gradients of a model output: forward caches everything a
// reverse sweep needs; backward turns d(loss)/d(output) into per-layer
// gradients plus d(loss)/d(input).
struct ModelTape {
  std::vector<Vector> inputs;      // per layer
  std::vector<Vector> matvec_out;  // W (x) x
  std::vector<Vector> preact;      // after bias
  std::vector<Vector> tangent;     // Log_0 before the nonlinearity
  Vector output;
};

struct LayerGrads {
  Matrix W;
  Vector b;
};
using ModelGrads = std::vector<LayerGrads>;

ModelGrads zero_grads(const Model& model);

Vector model_forward_tape(const Manifold& manifold, const Model& model,
                          const Vector& x, ModelTape& tape);

// Accumulates into `grads`; returns the gradient w.r.t. the input point.
Vector model_backward(const Manifold& manifold, const Model& model,
                      const ModelTape& tape, const Vector& out_bar, ModelGrads& grads);

// Mean distance to targets plus omega * sum_l ||W_l - anchor||_F^2,
// where the anchor is `reg_anchor` for layers of matching shape and the
// zero matrix otherwise. Returns the loss and its parameter gradients.
struct LossGrads {
  double loss = 0.0;
  ModelGrads grads;
};
LossGrads fit_loss_and_grads(const Manifold& manifold, const Model& model,
                             const Matrix& inputs, const Matrix& targets,
                             double omega, const Matrix& reg_anchor);

double fit_loss(const Manifold& manifold, const Model& model, const Matrix& inputs,
                const Matrix& targets, double omega, const Matrix& reg_anchor);

// Gradient of the barycentric data term
//   (1/n_s) sum_i d(B_i(M), t_i)
// with respect to the coupling, where B is the manifold's barycentric
// projection of the coupling onto the targets and t_i are the mapped
// source points. Also hands back B itself, which the caller needs for
// the conformal row scaling.
struct CouplingGrad {
  Matrix grad;        // n_s x n_t
  Matrix barycenter;  // n_s x d
};
CouplingGrad coupling_data_grad(const Manifold& manifold, const Matrix& mapped,
                                const Matrix& plan, const Matrix& targets);

}  // namespace hyperot

#endif  // HYPEROT_GRAD_HPP
