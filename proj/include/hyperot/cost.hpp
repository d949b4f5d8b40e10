#ifndef HYPEROT_COST_HPP
#define HYPEROT_COST_HPP

// Cost matrices for discrete OT. Hyperbolic kinds are compositions
// l(d_s(x, y)); the non-quadratic ones satisfy the MTW regularity
// conditions (neg_cosh and neg_log_one_plus_cosh the strong form,
// log_cosh / neg_log_cosh the weak form).

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hyperot/cloud.hpp"

namespace hyperot {

enum class CostKind {
  sq_euclidean,
  sq_hyperbolic,
  neg_cosh,
  neg_log_one_plus_cosh,
  log_cosh,
  neg_log_cosh,
};

struct CostMatrix {
  Matrix values;  // n_s x n_t
  CostKind kind = CostKind::sq_hyperbolic;
};

using MatchPairs = std::vector<std::pair<Index, Index>>;

inline bool is_hyperbolic_cost(CostKind kind) {
  return kind != CostKind::sq_euclidean;
}

// l applied to a distance value.
inline double cost_value(double d, CostKind kind) {
  switch (kind) {
    case CostKind::sq_euclidean:
    case CostKind::sq_hyperbolic:
      return d * d;
    case CostKind::neg_cosh:
      return -std::cosh(d);
    case CostKind::neg_log_one_plus_cosh:
      return -std::log1p(std::cosh(d));
    case CostKind::log_cosh:
      return std::log(std::cosh(d));
    case CostKind::neg_log_cosh:
      return -std::log(std::cosh(d));
  }
  return 0.0;
}

// dl/dd, used when differentiating costs through the distance.
inline double cost_derivative(double d, CostKind kind) {
  switch (kind) {
    case CostKind::sq_euclidean:
    case CostKind::sq_hyperbolic:
      return 2.0 * d;
    case CostKind::neg_cosh:
      return -std::sinh(d);
    case CostKind::neg_log_one_plus_cosh:
      return -std::sinh(d) / (1.0 + std::cosh(d));
    case CostKind::log_cosh:
      return std::tanh(d);
    case CostKind::neg_log_cosh:
      return -std::tanh(d);
  }
  return 0.0;
}

// Pairwise cost between two clouds. Hyperbolic kinds require both
// clouds on the same ball.
CostMatrix build_cost_matrix(const PointCloud& source, const PointCloud& target,
                             CostKind kind);

// Same, over raw row matrices (hyperbolic kinds use `ball`).
CostMatrix build_cost_matrix(const Matrix& source, const Matrix& target,
                             CostKind kind, const BallParams& ball);

// Value used in place of infinity when masking supervised entries.
double supervision_sentinel(const Matrix& values);

// Matched pairs get cost 0; every other entry in a matched row or
// column gets the sentinel. Unmatched rows/columns are untouched.
CostMatrix apply_supervision(const CostMatrix& cost, const MatchPairs& matched_pairs);

}  // namespace hyperot

#endif  // HYPEROT_COST_HPP
