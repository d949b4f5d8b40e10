#ifndef HYPEROT_OT_DIRECT_HPP
#define HYPEROT_OT_DIRECT_HPP

// Direct minimization of an entropic OT loss between the mapped source
// cloud and the target cloud. The plan is re-solved every step and
// treated as locally constant when differentiating (the envelope
// gradient of the value function); steps are accepted only when the
// re-evaluated true loss does not increase.

#include "hyperot/init.hpp"

namespace hyperot {

enum class OtDirectLoss { entropic, divergence };  // W_eps vs debiased SD_eps

struct OtDirectConfig {
  OtDirectLoss loss = OtDirectLoss::entropic;
  std::optional<CostKind> cost;  // defaults to the manifold's cost
  SinkhornConfig sinkhorn;
  OptimizerConfig opt;
  MatchPairs supervision;        // masked into the cross cost
};

struct OtDirectResult {
  Model model;
  std::vector<std::pair<int, double>> trace;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iters = 0;
};

// The training objective at fixed model parameters.
double ot_direct_loss(const Manifold& manifold, const Model& model,
                      const PointCloud& source, const PointCloud& target,
                      const OtDirectConfig& cfg);

OtDirectResult ot_direct_fit(const Manifold& manifold, const Model& model,
                             const PointCloud& source, const PointCloud& target,
                             const OtDirectConfig& cfg);

}  // namespace hyperot

#endif  // HYPEROT_OT_DIRECT_HPP
