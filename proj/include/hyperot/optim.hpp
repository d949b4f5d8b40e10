#ifndef HYPEROT_OPTIM_HPP
#define HYPEROT_OPTIM_HPP

// Riemannian first-order optimization of layer parameters. Weight
// matrices are flat parameters and move by plain steps; biases live on
// the ball, so their gradients are converted through the inverse metric
// and the update retracts along the exponential map. The Adam variant
// keeps ambient-coordinate moments of the converted gradients.

#include "hyperot/grad.hpp"

namespace hyperot {

enum class OptimizerKind { rgd, radam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::radam;
  double lr = 0.1;
  int max_iters = 200;
  double rel_tol = 1e-9;        // stop on relative loss change
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_backtracks = 25;      // lr halvings before giving up on a step
};

struct AdamState {
  std::vector<LayerGrads> m, v;
  int t = 0;
};

AdamState make_adam_state(const Model& model);

// One parameter update. For radam the moments in `state` are advanced;
// `scale` shrinks the step without touching the moments (used by the
// descent backtracking).
Model riemannian_step(const Manifold& manifold, const Model& model,
                      const ModelGrads& grads, OptimizerKind kind, double lr,
                      AdamState* state, double scale = 1.0, double beta1 = 0.9,
                      double beta2 = 0.999, double adam_eps = 1e-8);

struct FitResult {
  Model model;
  std::vector<std::pair<int, double>> trace;  // (iteration, accepted loss)
  double loss = 0.0;
  int iters = 0;
};

// Minimizes mean distance to `targets` plus omega ||W - anchor||_F^2.
// Steps are accepted only when they do not increase the loss, so the
// trace is non-increasing; the learning rate backs off on rejection and
// creeps back on acceptance.
FitResult fit_to_targets(const Manifold& manifold, const Model& model,
                         const Matrix& inputs, const Matrix& targets, double omega,
                         const Matrix& reg_anchor, const OptimizerConfig& cfg);

}  // namespace hyperot

#endif  // HYPEROT_OPTIM_HPP
