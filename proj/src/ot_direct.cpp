#include "hyperot/ot_direct.hpp"

#include <cmath>

namespace hyperot {

namespace {

struct LossEval {
  double value = 0.0;
  Matrix cross_plan;   // plan between mapped source and target
  Matrix self_plan;    // plan between mapped source and itself (divergence)
};

Vector grad_cost_first_arg(const Manifold& manifold, CostKind kind, const Vector& x,
                           const Vector& y) {
  const double d = kind == CostKind::sq_euclidean ? (x - y).norm()
                                                  : manifold.distance(x, y);
  if (d < 1e-12) return Vector::Zero(x.size());
  Vector gd;
  if (kind == CostKind::sq_euclidean)
    gd = (x - y) / d;
  else
    gd = grad_distance(manifold, x, y).first;
  return cost_derivative(d, kind) * gd;
}

class Objective {
 public:
  Objective(const Manifold& manifold, const PointCloud& source, const PointCloud& target,
            const OtDirectConfig& cfg)
      : manifold_(manifold), source_(source), target_(target), cfg_(cfg),
        kind_(cfg.cost.value_or(manifold.default_cost())) {
    if (cfg_.loss == OtDirectLoss::divergence) {
      const CostMatrix ctt =
          build_cost_matrix(target_.points, target_.points, kind_, manifold_.params);
      target_self_term_ =
          sinkhorn(target_.weights, target_.weights, ctt, cfg_.sinkhorn).objective;
    }
  }

  LossEval evaluate(const Matrix& mapped) {
    LossEval out;
    CostMatrix cross = build_cost_matrix(mapped, target_.points, kind_, manifold_.params);
    cross = apply_supervision(cross, cfg_.supervision);
    const SinkhornResult cross_res =
        sinkhorn(source_.weights, target_.weights, cross, cfg_.sinkhorn, cross_warm_);
    cross_warm_ = std::make_pair(cross_res.f, cross_res.g);
    out.cross_plan = cross_res.coupling.plan;
    out.value = cross_res.objective;

    if (cfg_.loss == OtDirectLoss::divergence) {
      const CostMatrix self =
          build_cost_matrix(mapped, mapped, kind_, manifold_.params);
      const SinkhornResult self_res =
          sinkhorn(source_.weights, source_.weights, self, cfg_.sinkhorn, self_warm_);
      self_warm_ = std::make_pair(self_res.f, self_res.g);
      out.self_plan = self_res.coupling.plan;
      out.value -= 0.5 * (self_res.objective + target_self_term_);
    }
    return out;
  }

  // Envelope gradient: plans held fixed, cost differentiated.
  Matrix point_grads(const Matrix& mapped, const LossEval& eval) const {
    const Index n = mapped.rows();
    Matrix grads = Matrix::Zero(n, mapped.cols());
    for (Index i = 0; i < n; ++i) {
      const Vector pi = mapped.row(i).transpose();
      Vector gi = Vector::Zero(mapped.cols());
      for (Index j = 0; j < target_.size(); ++j) {
        const double w = eval.cross_plan(i, j);
        if (w != 0.0)
          gi += w * grad_cost_first_arg(manifold_, kind_, pi, target_.point(j));
      }
      if (cfg_.loss == OtDirectLoss::divergence) {
        for (Index j = 0; j < n; ++j) {
          const double w = eval.self_plan(i, j) + eval.self_plan(j, i);
          if (w != 0.0)
            gi -= 0.5 * w *
                  grad_cost_first_arg(manifold_, kind_, pi, mapped.row(j).transpose());
        }
      }
      grads.row(i) = gi.transpose();
    }
    return grads;
  }

 private:
  const Manifold& manifold_;
  const PointCloud& source_;
  const PointCloud& target_;
  const OtDirectConfig& cfg_;
  CostKind kind_;
  double target_self_term_ = 0.0;
  std::optional<std::pair<Vector, Vector>> cross_warm_, self_warm_;
};

}  // namespace

double ot_direct_loss(const Manifold& manifold, const Model& model,
                      const PointCloud& source, const PointCloud& target,
                      const OtDirectConfig& cfg) {
  Objective obj(manifold, source, target, cfg);
  return obj.evaluate(model_forward(manifold, model, source.points)).value;
}

OtDirectResult ot_direct_fit(const Manifold& manifold, const Model& model,
                             const PointCloud& source, const PointCloud& target,
                             const OtDirectConfig& cfg) {
  validate_model(model);
  Objective obj(manifold, source, target, cfg);

  OtDirectResult res;
  res.model = model;
  Matrix mapped = model_forward(manifold, res.model, source.points);
  LossEval eval = obj.evaluate(mapped);
  if (!std::isfinite(eval.value))
    throw NumericalError("ot_direct: non-finite loss at initialization");
  res.initial_loss = eval.value;
  res.trace.emplace_back(0, eval.value);

  AdamState state = make_adam_state(model);
  double cur = eval.value;
  for (int it = 1; it <= cfg.opt.max_iters; ++it) {
    const Matrix pg = obj.point_grads(mapped, eval);

    // Backpropagate the per-point gradients into the parameters.
    ModelGrads grads = zero_grads(res.model);
    ModelTape tape;
    for (Index i = 0; i < source.size(); ++i) {
      model_forward_tape(manifold, res.model, source.point(i), tape);
      model_backward(manifold, res.model, tape, pg.row(i).transpose(), grads);
    }

    double gnorm = 0.0;
    for (const auto& g : grads) gnorm += g.W.squaredNorm() + g.b.squaredNorm();
    if (gnorm < 1e-24) break;

    bool accepted = false;
    Model candidate;
    LossEval cand_eval;
    AdamState trial_state = state;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (cfg.opt.kind != OptimizerKind::radam) break;
        state = make_adam_state(res.model);  // drop stale momentum
      }
      double scale = 1.0;
      for (int back = 0; back <= cfg.opt.max_backtracks; ++back) {
        trial_state = state;
        candidate = riemannian_step(manifold, res.model, grads, cfg.opt.kind, cfg.opt.lr,
                                    &trial_state, scale, cfg.opt.beta1, cfg.opt.beta2,
                                    cfg.opt.adam_eps);
        const Matrix cand_mapped = model_forward(manifold, candidate, source.points);
        cand_eval = obj.evaluate(cand_mapped);
        if (cand_eval.value <= cur + 1e-12) {
          accepted = true;
          mapped = cand_mapped;
          break;
        }
        scale *= 0.5;
      }
    }
    if (!accepted) break;

    state = trial_state;
    res.model = candidate;
    eval = cand_eval;
    const double prev = cur;
    cur = eval.value;
    res.trace.emplace_back(it, cur);
    res.iters = it;
    if (std::abs(prev - cur) <= cfg.opt.rel_tol * std::max(1.0, std::abs(cur))) break;
  }
  res.final_loss = cur;
  return res;
}

}  // namespace hyperot
