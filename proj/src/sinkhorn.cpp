#include "hyperot/sinkhorn.hpp"

#include <cmath>

namespace hyperot {

double marginal_error(const Matrix& plan, const Vector& a, const Vector& b) {
  const double row_err = (plan.rowwise().sum() - a).cwiseAbs().sum() / a.cwiseAbs().sum();
  const double col_err =
      (plan.colwise().sum().transpose() - b).cwiseAbs().sum() / b.cwiseAbs().sum();
  return std::max(row_err, col_err);
}

double transport_cost(const Matrix& plan, const Matrix& cost) {
  return (plan.array() * cost.array()).sum();
}

double plan_entropy(const Matrix& plan) {
  double h = 0.0;
  for (Index i = 0; i < plan.rows(); ++i)
    for (Index j = 0; j < plan.cols(); ++j) {
      const double m = plan(i, j);
      if (m > 0.0) h -= m * (std::log(m) - 1.0);
    }
  return h;
}

namespace {

// Row-wise log sum exp of (g^T - C_i:) / eps, streamed into f.
void update_rows(const Matrix& cost, const Vector& loga, const Vector& g,
                 double eps, Vector& f) {
  const Index ns = cost.rows();
  Eigen::ArrayXd z(cost.cols());
  for (Index i = 0; i < ns; ++i) {
    z = (g.transpose() - cost.row(i)).array() / eps;
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z - zmax).exp().sum());
    f[i] = eps * (loga[i] - lse);
  }
}

void update_cols(const Matrix& cost, const Vector& logb, const Vector& f,
                 double eps, Vector& g) {
  const Index nt = cost.cols();
  Eigen::ArrayXd z(cost.rows());
  for (Index j = 0; j < nt; ++j) {
    z = (f - cost.col(j)).array() / eps;
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z - zmax).exp().sum());
    g[j] = eps * (logb[j] - lse);
  }
}

Matrix plan_from_potentials(const Matrix& cost, const Vector& f, const Vector& g,
                            double eps) {
  return ((f.replicate(1, cost.cols()) + g.transpose().replicate(cost.rows(), 1) -
           cost).array() / eps).exp().matrix();
}

}  // namespace

SinkhornResult sinkhorn(const Vector& a, const Vector& b, const CostMatrix& cost,
                        const SinkhornConfig& cfg,
                        const std::optional<std::pair<Vector, Vector>>& warm) {
  const Matrix& C = cost.values;
  if (a.size() != C.rows() || b.size() != C.cols())
    throw DimensionError("sinkhorn: marginal sizes do not match the cost matrix");
  if (!(cfg.epsilon > 0.0)) throw NumericalError("sinkhorn: epsilon must be positive");
  if (!C.allFinite()) throw NumericalError("sinkhorn: cost matrix has non-finite entries");

  SinkhornResult res;
  res.coupling.row_marginal = a;
  res.coupling.col_marginal = b;

  const double eps = cfg.epsilon;
  if (cfg.log_domain) {
    const Vector loga = a.array().log().matrix();
    const Vector logb = b.array().log().matrix();
    Vector f = Vector::Zero(a.size());
    Vector g = Vector::Zero(b.size());
    if (warm) {
      f = warm->first;
      g = warm->second;
    }
    Matrix plan;
    for (int it = 1; it <= cfg.max_iters; ++it) {
      update_rows(C, loga, g, eps, f);
      update_cols(C, logb, f, eps, g);
      plan = plan_from_potentials(C, f, g, eps);
      res.iters = it;
      res.error = marginal_error(plan, a, b);
      if (res.error <= cfg.rel_tol) {
        res.converged = true;
        break;
      }
    }
    res.coupling.plan = plan;
    res.f = f;
    res.g = g;
  } else {
    const Matrix K = (-C / eps).array().exp().matrix();
    Vector u = Vector::Ones(a.size());
    Vector v = Vector::Ones(b.size());
    if (warm) {
      u = (warm->first / eps).array().exp().matrix();
      v = (warm->second / eps).array().exp().matrix();
    }
    Matrix plan;
    for (int it = 1; it <= cfg.max_iters; ++it) {
      u = a.cwiseQuotient(K * v);
      v = b.cwiseQuotient(K.transpose() * u);
      plan = u.asDiagonal() * K * v.asDiagonal();
      res.iters = it;
      res.error = marginal_error(plan, a, b);
      if (res.error <= cfg.rel_tol) {
        res.converged = true;
        break;
      }
    }
    if (!plan.allFinite())
      throw NumericalError("sinkhorn: scaling form overflowed; use log_domain");
    res.coupling.plan = plan;
    res.f = eps * u.array().log().matrix();
    res.g = eps * v.array().log().matrix();
  }

  res.cost = transport_cost(res.coupling.plan, C);
  res.objective = res.cost - eps * plan_entropy(res.coupling.plan);
  return res;
}

double sinkhorn_divergence(const PointCloud& source, const PointCloud& target,
                           CostKind kind, const SinkhornConfig& cfg) {
  const CostMatrix cst = build_cost_matrix(source, target, kind);
  const CostMatrix css = build_cost_matrix(source, source, kind);
  const CostMatrix ctt = build_cost_matrix(target, target, kind);
  const double wst = sinkhorn(source.weights, target.weights, cst, cfg).objective;
  const double wss = sinkhorn(source.weights, source.weights, css, cfg).objective;
  const double wtt = sinkhorn(target.weights, target.weights, ctt, cfg).objective;
  return wst - 0.5 * (wss + wtt);
}

}  // namespace hyperot
