#include "hyperot/cost.hpp"

#include <algorithm>
#include <vector>

namespace hyperot {

CostMatrix build_cost_matrix(const Matrix& source, const Matrix& target,
                             CostKind kind, const BallParams& ball) {
  if (source.cols() != target.cols())
    throw DimensionError("cost matrix: point dimensions differ");
  CostMatrix out;
  out.kind = kind;
  out.values.resize(source.rows(), target.rows());
  for (Index i = 0; i < source.rows(); ++i) {
    const Vector xi = source.row(i).transpose();
    for (Index j = 0; j < target.rows(); ++j) {
      const Vector yj = target.row(j).transpose();
      const double d = kind == CostKind::sq_euclidean ? (xi - yj).norm()
                                                      : distance(xi, yj, ball);
      out.values(i, j) = cost_value(d, kind);
    }
  }
  return out;
}

CostMatrix build_cost_matrix(const PointCloud& source, const PointCloud& target,
                             CostKind kind) {
  if (is_hyperbolic_cost(kind) && !source.ball.same_ball(target.ball))
    throw DimensionError("cost matrix: clouds live on different balls");
  return build_cost_matrix(source.points, target.points, kind, source.ball);
}

double supervision_sentinel(const Matrix& values) {
  return 1e6 * (values.array().abs().maxCoeff() + 1.0);
}

CostMatrix apply_supervision(const CostMatrix& cost, const MatchPairs& matched_pairs) {
  CostMatrix out = cost;
  if (matched_pairs.empty()) return out;

  const Index ns = cost.values.rows();
  const Index nt = cost.values.cols();
  std::vector<bool> row_matched(ns, false), col_matched(nt, false);
  for (const auto& [i, j] : matched_pairs) {
    if (i < 0 || i >= ns || j < 0 || j >= nt)
      throw DimensionError("supervision pair (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") out of range");
    row_matched[i] = true;
    col_matched[j] = true;
  }

  const double sentinel = supervision_sentinel(cost.values);
  for (Index i = 0; i < ns; ++i)
    for (Index j = 0; j < nt; ++j)
      if (row_matched[i] || col_matched[j]) out.values(i, j) = sentinel;
  for (const auto& [i, j] : matched_pairs) out.values(i, j) = 0.0;
  return out;
}

}  // namespace hyperot
