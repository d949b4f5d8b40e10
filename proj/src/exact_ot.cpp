#include "hyperot/exact_ot.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace hyperot {

namespace {

bool is_uniform(const Vector& w) {
  const double u = 1.0 / double(w.size());
  return ((w.array() - u).abs() < 1e-12).all();
}

}  // namespace

Coupling exact_ot_assignment(const Vector& a, const CostMatrix& cost) {
  const Matrix& C = cost.values;
  const Index n = C.rows();
  if (C.cols() != n) throw DimensionError("assignment path needs a square cost matrix");
  if (n > 8) throw DimensionError("assignment path limited to n <= 8");

  std::vector<Index> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), Index(0));
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (Index i = 0; i < n; ++i) c += C(i, perm[i]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Coupling out;
  out.plan = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) out.plan(i, best[i]) = 1.0 / double(n);
  out.row_marginal = a;
  out.col_marginal = a;
  return out;
}

// Bipartite network simplex over the transportation polytope. The basis
// is a spanning tree of the (m + n)-node bipartite graph; Bland's rule
// on both the entering and the leaving cell rules out cycling under
// degeneracy.
Coupling exact_ot_simplex(const Vector& a, const Vector& b, const CostMatrix& cost) {
  const Matrix& C = cost.values;
  const Index m = C.rows(), n = C.cols();
  if (a.size() != m || b.size() != n)
    throw DimensionError("exact_ot: marginal sizes do not match the cost matrix");
  if (std::abs(a.sum() - b.sum()) > 1e-9)
    throw NumericalError("exact_ot: marginals have different total mass");

  Matrix flow = Matrix::Zero(m, n);
  std::vector<std::vector<char>> basic(m, std::vector<char>(n, 0));

  // Northwest-corner starting basis.
  {
    Vector ra = a, rb = b;
    Index i = 0, j = 0;
    while (i < m && j < n) {
      const double q = std::min(ra[i], rb[j]);
      flow(i, j) = q;
      basic[i][j] = 1;
      ra[i] -= q;
      rb[j] -= q;
      // On ties advance only one side so the basis keeps m + n - 1 cells.
      if (ra[i] <= rb[j] && i + 1 < m)
        ++i;
      else
        ++j;
    }
  }

  const int max_pivots = 100000;
  std::vector<double> u(m), v(n);
  std::vector<char> u_set(m), v_set(n);

  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    // Duals from the basis tree: u_i + v_j = c_ij on basic cells.
    std::fill(u_set.begin(), u_set.end(), 0);
    std::fill(v_set.begin(), v_set.end(), 0);
    u[0] = 0.0;
    u_set[0] = 1;
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
          if (!basic[i][j]) continue;
          if (u_set[i] && !v_set[j]) {
            v[j] = C(i, j) - u[i];
            v_set[j] = 1;
            progressed = true;
          } else if (!u_set[i] && v_set[j]) {
            u[i] = C(i, j) - v[j];
            u_set[i] = 1;
            progressed = true;
          }
        }
    }
    for (Index i = 0; i < m; ++i)
      if (!u_set[i]) throw NumericalError("exact_ot: basis lost connectivity");

    // Entering cell: first with negative reduced cost (Bland).
    Index ei = -1, ej = -1;
    for (Index i = 0; i < m && ei < 0; ++i)
      for (Index j = 0; j < n; ++j)
        if (!basic[i][j] && C(i, j) - u[i] - v[j] < -1e-12) {
          ei = i;
          ej = j;
          break;
        }
    if (ei < 0) break;  // optimal

    // The unique basis cycle through (ei, ej): path from row ei to
    // column ej in the tree, found by depth-first search alternating
    // row and column nodes.
    std::vector<std::pair<Index, Index>> path;
    std::vector<char> row_seen(m, 0), col_seen(n, 0);
    row_seen[ei] = 1;
    auto dfs = [&](auto&& self, Index row) -> bool {
      for (Index j = 0; j < n; ++j) {
        if (!basic[row][j] || col_seen[j]) continue;
        col_seen[j] = 1;
        path.emplace_back(row, j);
        if (j == ej) return true;
        for (Index i2 = 0; i2 < m; ++i2) {
          if (!basic[i2][j] || row_seen[i2]) continue;
          row_seen[i2] = 1;
          path.emplace_back(i2, j);
          if (self(self, i2)) return true;
          path.pop_back();
          row_seen[i2] = 0;
        }
        path.pop_back();
        col_seen[j] = 0;
      }
      return false;
    };
    if (!dfs(dfs, ei)) throw NumericalError("exact_ot: no pivot cycle found");

    // Cycle = entering cell (+) then path cells alternating (-, +, ...).
    // Leaving cell: smallest lexicographic index among the minimizers,
    // which together with the Bland entering rule prevents cycling.
    double theta = std::numeric_limits<double>::infinity();
    Index li = -1, lj = -1;
    for (size_t k = 0; k < path.size(); k += 2) {
      const auto [i, j] = path[k];
      const bool better = flow(i, j) < theta - 1e-15 ||
                          (flow(i, j) < theta + 1e-15 &&
                           (li < 0 || i * n + j < li * n + lj));
      if (better) {
        theta = std::min(theta, flow(i, j));
        li = i;
        lj = j;
      }
    }
    flow(ei, ej) += theta;
    basic[ei][ej] = 1;
    for (size_t k = 0; k < path.size(); ++k) {
      const auto [i, j] = path[k];
      flow(i, j) += (k % 2 == 0) ? -theta : theta;
    }
    flow(li, lj) = 0.0;
    basic[li][lj] = 0;
  }

  Coupling out;
  out.plan = flow.cwiseMax(0.0);
  out.row_marginal = a;
  out.col_marginal = b;
  return out;
}

Coupling exact_ot(const Vector& a, const Vector& b, const CostMatrix& cost) {
  const Index m = cost.values.rows(), n = cost.values.cols();
  if (a.size() != m || b.size() != n)
    throw DimensionError("exact_ot: marginal sizes do not match the cost matrix");
  if (m == n && m <= 8 && is_uniform(a) && is_uniform(b))
    return exact_ot_assignment(a, cost);
  if (m * n <= 64) return exact_ot_simplex(a, b, cost);
  throw DimensionError("exact_ot: instance too large (" + std::to_string(m) + "x" +
                       std::to_string(n) + ")");
}

}  // namespace hyperot
