#include "hyperot/otda.hpp"

#include <limits>

namespace hyperot {

OtdaMap otda_fit(const Manifold& manifold, const Coupling& coupling,
                 const PointCloud& source, const PointCloud& target) {
  if (source.size() == 0) throw DimensionError("otda_fit: empty training set");
  if (coupling.plan.rows() != source.size() || coupling.plan.cols() != target.size())
    throw DimensionError("otda_fit: coupling shape does not match the clouds");
  OtdaMap map;
  map.manifold = manifold;
  map.train_src = source.points;
  map.images = manifold.barycenter(coupling.plan, target.points);
  return map;
}

Vector otda_transform(const OtdaMap& map, const Vector& x) {
  if (map.train_src.rows() == 0) throw DimensionError("otda_transform: empty map");
  Index nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < map.train_src.rows(); ++i) {
    const double d = map.manifold.distance(map.train_src.row(i).transpose(), x);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  const Vector anchor = map.train_src.row(nearest).transpose();
  const Vector image = map.images.row(nearest).transpose();
  return map.manifold.add(image, map.manifold.add(-anchor, x));
}

Matrix otda_transform(const OtdaMap& map, const Matrix& points) {
  Matrix out(points.rows(), points.cols());
  for (Index i = 0; i < points.rows(); ++i)
    out.row(i) = otda_transform(map, Vector(points.row(i).transpose())).transpose();
  return out;
}

}  // namespace hyperot
