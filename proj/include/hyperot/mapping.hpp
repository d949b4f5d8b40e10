#ifndef HYPEROT_MAPPING_HPP
#define HYPEROT_MAPPING_HPP

// Joint estimation of a coupling and a transport model by block
// coordinate descent. The coupling step is a generalized conditional
// gradient: the data-fit term is linearized at the current coupling
// while the entropic OT terms stay exact, so the linear oracle is a
// Sinkhorn problem with a shifted cost; an Armijo backtracking step
// moves along the oracle direction. The model step fits the model to
// the barycentric projection of the fixed coupling.

#include "hyperot/init.hpp"

namespace hyperot {

struct MeConfig {
  double eta = 1.0;      // trade-off between map quality and the OT terms
  double omega = 1e-3;   // weight of ||W - anchor||_F^2
  double epsilon = 0.01;
  Matrix anchor;         // empty: identity when the first layer is square
  int max_outer = 20;
  double outer_rel_tol = 1e-7;
  int gcg_max_iters = 5;
  double gcg_rel_tol = 1e-9;
  SinkhornConfig sinkhorn;     // epsilon is overridden per step
  OptimizerConfig model_step;
  bool drop_data_term = false;  // the eta -> infinity reduction: coupling
                                // step becomes plain entropic OT
  int armijo_max_backtracks = 30;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
};

struct TrainState {
  Coupling coupling;
  Model model;
  std::vector<std::pair<int, double>> trace;  // (outer iteration, total loss)
  std::vector<double> coupling_feasibility;   // marginal error per outer iteration
  bool converged = false;
  int outer_iters = 0;
  std::string diagnostic;
};

// Data-fit term: mean distance between the barycentric projection of
// the coupling and the mapped source points.
double barycentric_fit_term(const Manifold& manifold, const Model& model,
                            const PointCloud& source, const PointCloud& target,
                            const Matrix& plan);

// Full objective: fit term + omega * regularizer + eta (<M,C> - eps H).
double me_total_loss(const Manifold& manifold, const Model& model,
                     const PointCloud& source, const PointCloud& target,
                     const Matrix& plan, const Matrix& cost, const MeConfig& cfg);

// `model` must be initialized (any strategy); `cost` is the supervision-
// masked cost matrix between the clouds.
TrainState me_fit(const Manifold& manifold, const PointCloud& source,
                  const PointCloud& target, const Model& model, const CostMatrix& cost,
                  const MeConfig& cfg);

}  // namespace hyperot

#endif  // HYPEROT_MAPPING_HPP
