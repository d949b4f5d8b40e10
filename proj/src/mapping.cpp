#include "hyperot/mapping.hpp"

#include <cmath>

namespace hyperot {

namespace {

Matrix effective_anchor(const Model& model, const Matrix& anchor) {
  if (anchor.size() > 0) return anchor;
  const Matrix& W0 = model.layers.front().W;
  if (W0.rows() == W0.cols()) return Matrix::Identity(W0.rows(), W0.cols());
  return Matrix();  // falls back to a zero anchor in the regularizer
}

double model_regularizer(const Model& model, double omega, const Matrix& anchor) {
  if (omega == 0.0) return 0.0;
  double reg = 0.0;
  for (const auto& layer : model.layers) {
    const bool match = anchor.rows() == layer.W.rows() && anchor.cols() == layer.W.cols();
    reg += omega * (match ? Matrix(layer.W - anchor) : layer.W).squaredNorm();
  }
  return reg;
}

// <M,C> - eps H(M), the entropic OT objective at a fixed plan.
double ot_term(const Matrix& plan, const Matrix& cost, double epsilon) {
  return transport_cost(plan, cost) - epsilon * plan_entropy(plan);
}

}  // namespace

double barycentric_fit_term(const Manifold& manifold, const Model& model,
                            const PointCloud& source, const PointCloud& target,
                            const Matrix& plan) {
  const Matrix bary = manifold.barycenter(plan, target.points);
  const Matrix mapped = model_forward(manifold, model, source.points);
  double fit = 0.0;
  for (Index i = 0; i < source.size(); ++i)
    fit += manifold.distance(bary.row(i).transpose(), mapped.row(i).transpose());
  return fit / double(source.size());
}

double me_total_loss(const Manifold& manifold, const Model& model,
                     const PointCloud& source, const PointCloud& target,
                     const Matrix& plan, const Matrix& cost, const MeConfig& cfg) {
  const double fit = barycentric_fit_term(manifold, model, source, target, plan);
  const double reg = model_regularizer(model, cfg.omega, effective_anchor(model, cfg.anchor));
  const double eta = cfg.drop_data_term ? 1.0 : cfg.eta;
  return fit + reg + eta * ot_term(plan, cost, cfg.epsilon);
}

TrainState me_fit(const Manifold& manifold, const PointCloud& source,
                  const PointCloud& target, const Model& model, const CostMatrix& cost,
                  const MeConfig& cfg) {
  validate_model(model);
  const Vector& a = source.weights;
  const Vector& b = target.weights;
  const Matrix& C = cost.values;
  const Matrix anchor = effective_anchor(model, cfg.anchor);

  TrainState state;
  state.model = model;
  state.coupling.row_marginal = a;
  state.coupling.col_marginal = b;
  state.coupling.plan = a * b.transpose();  // product coupling: exactly feasible

  double prev_total = me_total_loss(manifold, state.model, source, target,
                                    state.coupling.plan, C, cfg);
  state.trace.emplace_back(0, prev_total);

  std::optional<std::pair<Vector, Vector>> warm;
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    // Coupling step.
    if (cfg.drop_data_term) {
      // The subproblem no longer involves the model; its solution is the
      // plain entropic coupling, computed once.
      if (outer == 1) {
        SinkhornConfig scfg = cfg.sinkhorn;
        scfg.epsilon = cfg.epsilon;
        const SinkhornResult sk = sinkhorn(a, b, {C, cost.kind}, scfg);
        state.coupling.plan = sk.coupling.plan;
      }
    } else {
      const Matrix mapped = model_forward(manifold, state.model, source.points);
      Matrix& M = state.coupling.plan;
      double fit_cur = 0.0;
      {
        const CouplingGrad cg0 = coupling_data_grad(manifold, mapped, M, target.points);
        for (Index i = 0; i < M.rows(); ++i)
          fit_cur += manifold.distance(cg0.barycenter.row(i).transpose(),
                                       mapped.row(i).transpose());
        fit_cur /= double(M.rows());
      }
      double phi_cur = fit_cur + cfg.eta * ot_term(M, C, cfg.epsilon);

      for (int inner = 0; inner < cfg.gcg_max_iters; ++inner) {
        const CouplingGrad cg = coupling_data_grad(manifold, mapped, M, target.points);

        // Oracle cost: eta C plus the data gradient pulled back through
        // the inverse metric at each row's barycentric image.
        Matrix oracle_cost = cfg.eta * C;
        for (Index i = 0; i < M.rows(); ++i) {
          const double lam = manifold.lambda(cg.barycenter.row(i).transpose());
          oracle_cost.row(i) += cg.grad.row(i) / (lam * lam);
        }
        SinkhornConfig scfg = cfg.sinkhorn;
        scfg.epsilon = cfg.eta * cfg.epsilon;
        const SinkhornResult sk =
            sinkhorn(a, b, {oracle_cost, cost.kind}, scfg, warm);
        warm = std::make_pair(sk.f, sk.g);
        const Matrix direction = sk.coupling.plan - M;

        // True directional derivative of the objective at M.
        double dphi = 0.0;
        for (Index i = 0; i < M.rows(); ++i)
          for (Index j = 0; j < M.cols(); ++j) {
            const double dij = direction(i, j);
            if (dij == 0.0) continue;
            const double logm = std::log(std::max(M(i, j), 1e-300));
            dphi += (cfg.eta * (C(i, j) + cfg.epsilon * logm) + cg.grad(i, j)) * dij;
          }
        if (dphi >= -1e-15) break;

        double alpha = 1.0;
        bool accepted = false;
        double phi_new = phi_cur;
        for (int back = 0; back <= cfg.armijo_max_backtracks; ++back) {
          const Matrix trial = M + alpha * direction;
          double fit_trial = 0.0;
          const CouplingGrad cgt =
              coupling_data_grad(manifold, mapped, trial, target.points);
          for (Index i = 0; i < M.rows(); ++i)
            fit_trial += manifold.distance(cgt.barycenter.row(i).transpose(),
                                           mapped.row(i).transpose());
          fit_trial /= double(M.rows());
          phi_new = fit_trial + cfg.eta * ot_term(trial, C, cfg.epsilon);
          if (phi_new <= phi_cur + cfg.armijo_c * alpha * dphi) {
            M = trial;
            accepted = true;
            break;
          }
          alpha *= cfg.armijo_shrink;
        }
        if (!accepted) {
          state.diagnostic = "coupling line search failed after " +
                             std::to_string(cfg.armijo_max_backtracks) + " backtracks";
          throw NumericalError(state.diagnostic);
        }
        const double drop = phi_cur - phi_new;
        phi_cur = phi_new;
        if (drop <= cfg.gcg_rel_tol * std::max(1.0, std::abs(phi_cur))) break;
      }
    }

    // Model step against the projection of the fixed coupling.
    const Matrix bary = manifold.barycenter(state.coupling.plan, target.points);
    state.model = fit_to_targets(manifold, state.model, source.points, bary, cfg.omega,
                                 anchor, cfg.model_step)
                      .model;

    const double total =
        me_total_loss(manifold, state.model, source, target, state.coupling.plan, C, cfg);
    state.trace.emplace_back(outer, total);
    state.coupling_feasibility.push_back(marginal_error(state.coupling.plan, a, b));
    state.outer_iters = outer;
    if (std::abs(prev_total - total) <= cfg.outer_rel_tol * std::max(1.0, std::abs(total))) {
      state.converged = true;
      break;
    }
    prev_total = total;
  }
  return state;
}

}  // namespace hyperot
