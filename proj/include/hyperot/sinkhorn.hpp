#ifndef HYPEROT_SINKHORN_HPP
#define HYPEROT_SINKHORN_HPP

#include <optional>

#include "hyperot/cost.hpp"

namespace hyperot {

struct SinkhornConfig {
  double epsilon = 0.01;
  int max_iters = 100;
  double rel_tol = 1e-7;
  bool log_domain = true;
};

// Transport plan with the marginals it was asked to satisfy.
struct Coupling {
  Matrix plan;          // n_s x n_t, entries >= 0
  Vector row_marginal;  // a
  Vector col_marginal;  // b
};

// Max of the relative L1 violations of the two marginals.
double marginal_error(const Matrix& plan, const Vector& a, const Vector& b);

// <M, C>.
double transport_cost(const Matrix& plan, const Matrix& cost);

// H(M) = -sum M_ij (log M_ij - 1), with 0 log 0 = 0.
double plan_entropy(const Matrix& plan);

struct SinkhornResult {
  Coupling coupling;
  Vector f, g;             // dual potentials (log-domain scalings)
  int iters = 0;
  double error = 0.0;      // final marginal error
  bool converged = false;
  double cost = 0.0;       // <M, C>
  double objective = 0.0;  // <M, C> - epsilon H(M)
};

// Entropic OT by Sinkhorn scaling. Log-domain updates by default;
// the plain exponentiated form is kept for cross-checking at moderate
// epsilon. Deterministic: fixed sweep order, no parallel reductions.
// `warm` seeds the dual potentials (sized f: n_s, g: n_t).
SinkhornResult sinkhorn(const Vector& a, const Vector& b, const CostMatrix& cost,
                        const SinkhornConfig& cfg,
                        const std::optional<std::pair<Vector, Vector>>& warm = std::nullopt);

// Debiased divergence SD = W(a,b) - (W(a,a) + W(b,b)) / 2, with W the
// optimal entropic objective.
double sinkhorn_divergence(const PointCloud& source, const PointCloud& target,
                           CostKind kind, const SinkhornConfig& cfg);

}  // namespace hyperot

#endif  // HYPEROT_SINKHORN_HPP
