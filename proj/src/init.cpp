#include "hyperot/init.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace hyperot {

std::string init_strategy_name(InitStrategy s) {
  switch (s) {
    case InitStrategy::random: return "random";
    case InitStrategy::permutation: return "permutation";
    case InitStrategy::identity: return "identity";
    case InitStrategy::procrustes: return "procrustes";
    case InitStrategy::gyrobarycenter: return "gyrobarycenter";
  }
  return "?";
}

std::optional<InitStrategy> parse_init_strategy(const std::string& name) {
  for (InitStrategy s : {InitStrategy::random, InitStrategy::permutation,
                         InitStrategy::identity, InitStrategy::procrustes,
                         InitStrategy::gyrobarycenter})
    if (init_strategy_name(s) == name) return s;
  return std::nullopt;
}

Matrix procrustes_rotation(const Matrix& source, const Matrix& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols())
    throw DimensionError("procrustes: clouds must have matching shape");
  const Matrix cross = target.transpose() * source;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Model init_map(const Manifold& manifold, InitStrategy strategy, const PointCloud& source,
               const PointCloud& target, std::uint64_t seed, const InitConfig& cfg) {
  std::vector<Index> dims;
  dims.push_back(source.dim());
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(target.dim());
  Model model = make_model(dims, cfg.nonlinearity, seed, cfg.use_bias);
  if (strategy == InitStrategy::random) return model;

  Matrix surrogate;
  switch (strategy) {
    case InitStrategy::permutation: {
      if (source.size() != target.size())
        throw DimensionError("permutation init requires equally sized clouds");
      std::vector<Index> perm(target.size());
      std::iota(perm.begin(), perm.end(), Index(0));
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
      std::shuffle(perm.begin(), perm.end(), rng);
      surrogate.resize(target.size(), target.dim());
      for (Index i = 0; i < target.size(); ++i)
        surrogate.row(i) = target.points.row(perm[i]);
      break;
    }
    case InitStrategy::identity: {
      if (source.dim() != target.dim())
        throw DimensionError("identity init requires matching dimensions");
      surrogate = source.points;
      break;
    }
    case InitStrategy::procrustes: {
      if (source.size() != target.size())
        throw DimensionError("procrustes init requires equally sized clouds");
      const Matrix P = procrustes_rotation(source.points, target.points);
      surrogate = source.points * P.transpose();
      break;
    }
    case InitStrategy::gyrobarycenter: {
      const CostKind kind = cfg.cost.value_or(manifold.default_cost());
      const CostMatrix C = manifold.hyperbolic()
                               ? build_cost_matrix(source, target, kind)
                               : build_cost_matrix(source.points, target.points, kind,
                                                   manifold.params);
      const SinkhornResult sk = sinkhorn(source.weights, target.weights, C, cfg.sinkhorn);
      surrogate = manifold.barycenter(sk.coupling.plan, target.points);
      break;
    }
    case InitStrategy::random:
      break;  // handled above
  }

  return fit_to_targets(manifold, model, source.points, surrogate, 0.0, Matrix(),
                        cfg.pretrain)
      .model;
}

}  // namespace hyperot
