#ifndef HYPEROT_INIT_HPP
#define HYPEROT_INIT_HPP

// Pre-training strategies for transport models. Apart from `random`,
// each one builds a surrogate target set and fits the fresh model to it:
// a shuffled copy of the targets, the source itself, its best rotation,
// or the barycentric projection of an entropic coupling.

#include <cstdint>
#include <optional>
#include <string>

#include "hyperot/optim.hpp"
#include "hyperot/sinkhorn.hpp"

namespace hyperot {

enum class InitStrategy { random, permutation, identity, procrustes, gyrobarycenter };

std::string init_strategy_name(InitStrategy s);
std::optional<InitStrategy> parse_init_strategy(const std::string& name);

struct InitConfig {
  std::vector<Index> hidden;  // hidden widths; empty = single linear layer
  Nonlinearity nonlinearity = Nonlinearity::none;
  bool use_bias = true;
  OptimizerConfig pretrain;
  SinkhornConfig sinkhorn;              // used by the barycentric strategy
  std::optional<CostKind> cost;         // defaults to the manifold's cost
};

// Orthogonal matrix P minimizing ||targets - source P^T||_F over rows
// (the polar factor of targets^T source).
Matrix procrustes_rotation(const Matrix& source, const Matrix& target);

// A fresh seeded model, pre-trained per the strategy. permutation and
// procrustes require equally sized clouds.
Model init_map(const Manifold& manifold, InitStrategy strategy, const PointCloud& source,
               const PointCloud& target, std::uint64_t seed, const InitConfig& cfg);

}  // namespace hyperot

#endif  // HYPEROT_INIT_HPP
