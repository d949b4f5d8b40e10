#ifndef HYPEROT_OTDA_HPP
#define HYPEROT_OTDA_HPP

// Domain adaptation by memorized barycentric images: training points
// map to the barycentric projection of their coupling row; anything
// else rides along with its nearest training point by translation.

#include "hyperot/manifold.hpp"
#include "hyperot/sinkhorn.hpp"

namespace hyperot {

struct OtdaMap {
  Matrix train_src;  // n_s x d training points
  Matrix images;     // n_s x d barycentric images
  Manifold manifold;
};

// Stores the barycentric projection of `coupling` onto the targets.
OtdaMap otda_fit(const Manifold& manifold, const Coupling& coupling,
                 const PointCloud& source, const PointCloud& target);

// B(X_i) (+) ((-X_i) (+) x) with i the nearest training point
// (lowest index on ties). Training points map exactly to their images.
Vector otda_transform(const OtdaMap& map, const Vector& x);
Matrix otda_transform(const OtdaMap& map, const Matrix& points);

}  // namespace hyperot

#endif  // HYPEROT_OTDA_HPP
