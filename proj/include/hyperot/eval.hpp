#ifndef HYPEROT_EVAL_HPP
#define HYPEROT_EVAL_HPP

// Synthetic alignment tasks, retrieval metrics and the supervised
// cross-validation protocol. Transported embeddings are always ranked
// under the hyperbolic distance, whichever estimator produced them.

#include <string>

#include "hyperot/mapping.hpp"
#include "hyperot/ot_direct.hpp"

namespace hyperot {

struct AlignmentTask {
  PointCloud source;
  PointCloud target;
  MatchPairs matches;            // ground-truth pairs (source row, target row)
  double train_fraction = 0.10;
};

// Percentage of matches (i, j) whose target j ranks within the top k
// targets by distance from transported row i. Ties break by target
// index; k is clamped to the number of targets.
double hits_at_k(const Matrix& transported, const PointCloud& targets,
                 const MatchPairs& matches, Index k);

// Source cloud drawn from a wrapped-Gaussian mixture (2 to 4
// components); target = a planted wrapped-linear pushforward of the
// source with wrapped-Gaussian noise of scale `noise_scale` applied at
// each image point; matches are the identity pairing. Needs
// n >= 2 (d + 1).
AlignmentTask make_synthetic_task(Index d, Index n, double noise_scale,
                                  std::uint64_t seed, const BallParams& ball);

enum class Method {
  wlinear,
  otda,
  me,
  ot_direct_w,
  ot_direct_sd,
  euclid_linear,
  euclid_otda,
  euclid_me,
};

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
bool method_is_euclidean(Method m);

struct ProtocolConfig {
  double epsilon = 0.01;
  double eta = 1.0;
  double omega = 1e-3;
  std::optional<CostKind> cost;          // default: manifold's cost
  InitStrategy init = InitStrategy::gyrobarycenter;
  std::uint64_t seed = 0;
  SinkhornConfig sinkhorn;               // epsilon overridden by `epsilon`
  OptimizerConfig fit_budget;            // pretrain / model-step / direct budget
  int me_max_outer = 8;
  int ot_direct_iters = 60;
  std::vector<Index> hidden;             // hidden widths of learned models
  Nonlinearity nonlinearity = Nonlinearity::none;
};

// Fits `method` on the training pairs and transports every source
// point. The returned coupling is empty for closed-form methods.
struct MethodOutput {
  Matrix transported;
  Matrix coupling;  // 0 x 0 when the method produces none
};
MethodOutput run_method(Method method, const PointCloud& source, const PointCloud& target,
                        const MatchPairs& train_pairs, const ProtocolConfig& cfg,
                        std::uint64_t seed);

struct AlignmentReport {
  std::string method;
  double hits_forward = 0.0;   // source -> target
  double hits_backward = 0.0;  // target -> source
  Index k = 10;
  int folds = 0;
  double seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
};

// Rotating-slice cross-validation: matches are shuffled once per
// direction (seeded), sliced into `folds` train windows of size
// round(train_fraction * n), and Hits@k on the complement is averaged
// across folds. Both directions are fitted and reported.
AlignmentReport run_protocol(const AlignmentTask& task, Method method, int folds,
                             const ProtocolConfig& cfg, Index k = 10);

}  // namespace hyperot

#endif  // HYPEROT_EVAL_HPP
