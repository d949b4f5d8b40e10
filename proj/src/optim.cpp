#include "hyperot/optim.hpp"

#include <cmath>

namespace hyperot {

AdamState make_adam_state(const Model& model) {
  AdamState state;
  state.m = zero_grads(model);
  state.v = zero_grads(model);
  return state;
}

namespace {

Matrix adam_direction(const Matrix& mhat, const Matrix& vhat, double eps) {
  return (mhat.array() / (vhat.array().sqrt() + eps)).matrix();
}

}  // namespace

Model riemannian_step(const Manifold& manifold, const Model& model,
                      const ModelGrads& grads, OptimizerKind kind, double lr,
                      AdamState* state, double scale, double beta1, double beta2,
                      double adam_eps) {
  Model out = model;
  const bool adam = kind == OptimizerKind::radam;
  if (adam) {
    if (state == nullptr) throw NumericalError("riemannian_step: radam needs state");
    ++state->t;
  }

  for (size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& gW = grads[l].W;
    Vector gb = grads[l].b;
    if (manifold.hyperbolic() && model.use_bias)
      gb = riemannian_grad(gb, model.layers[l].b, manifold.params);

    Matrix stepW;
    Vector stepb;
    if (adam) {
      auto& st = *state;
      st.m[l].W = beta1 * st.m[l].W + (1.0 - beta1) * gW;
      st.v[l].W = beta2 * st.v[l].W + (1.0 - beta2) * gW.cwiseProduct(gW);
      st.m[l].b = beta1 * st.m[l].b + (1.0 - beta1) * gb;
      st.v[l].b = beta2 * st.v[l].b + (1.0 - beta2) * gb.cwiseProduct(gb);
      const double c1 = 1.0 - std::pow(beta1, st.t);
      const double c2 = 1.0 - std::pow(beta2, st.t);
      stepW = lr * scale * adam_direction(st.m[l].W / c1, st.v[l].W / c2, adam_eps);
      stepb = lr * scale *
              adam_direction(Matrix(st.m[l].b / c1), Matrix(st.v[l].b / c2), adam_eps);
    } else {
      stepW = lr * scale * gW;
      stepb = lr * scale * gb;
    }

    out.layers[l].W = model.layers[l].W - stepW;
    if (model.use_bias) {
      if (manifold.hyperbolic()) {
        out.layers[l].b =
            clamp_to_ball(exp_map(model.layers[l].b, Vector(-stepb), manifold.params),
                          manifold.params);
      } else {
        out.layers[l].b = model.layers[l].b - stepb;
      }
    }
  }
  return out;
}

FitResult fit_to_targets(const Manifold& manifold, const Model& model,
                         const Matrix& inputs, const Matrix& targets, double omega,
                         const Matrix& reg_anchor, const OptimizerConfig& cfg) {
  FitResult res;
  res.model = model;
  double cur = fit_loss(manifold, res.model, inputs, targets, omega, reg_anchor);
  res.trace.emplace_back(0, cur);

  AdamState state = make_adam_state(model);
  double lr = cfg.lr;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const LossGrads lg =
        fit_loss_and_grads(manifold, res.model, inputs, targets, omega, reg_anchor);

    double gnorm = 0.0;
    for (const auto& g : lg.grads) gnorm += g.W.squaredNorm() + g.b.squaredNorm();
    if (gnorm < 1e-24) break;

    bool accepted = false;
    AdamState trial_state = state;
    Model candidate;
    double cand = cur;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      // Stale momentum can point uphill; retry once with fresh moments.
      if (attempt == 1) {
        if (cfg.kind != OptimizerKind::radam) break;
        state = make_adam_state(res.model);
      }
      double scale = 1.0;
      for (int back = 0; back <= cfg.max_backtracks; ++back) {
        trial_state = state;
        candidate = riemannian_step(manifold, res.model, lg.grads, cfg.kind, lr,
                                    &trial_state, scale, cfg.beta1, cfg.beta2,
                                    cfg.adam_eps);
        cand = fit_loss(manifold, candidate, inputs, targets, omega, reg_anchor);
        if (cand <= cur + 1e-12) {
          accepted = true;
          break;
        }
        scale *= 0.5;
      }
    }
    if (!accepted) break;

    state = trial_state;
    res.model = candidate;
    const double prev = cur;
    cur = cand;
    res.trace.emplace_back(it, cur);
    res.iters = it;
    if (std::abs(prev - cur) <= cfg.rel_tol * std::max(1.0, std::abs(cur))) break;
  }
  res.loss = cur;
  return res;
}

}  // namespace hyperot
