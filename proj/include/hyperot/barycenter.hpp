#ifndef HYPEROT_BARYCENTER_HPP
#define HYPEROT_BARYCENTER_HPP

#include "hyperot/cloud.hpp"

namespace hyperot {

struct BarycenterResult {
  Matrix projected;  // n_s x d, one projected point per coupling row
  GammaConvention convention = GammaConvention::lorentz;
};

// diag(M 1)^{-1} M X_t: each source row goes to the weighted average of
// the targets under its coupling row. Throws (naming the row) when a
// row of the coupling carries no mass.
BarycenterResult euclid_barycenter_map(const Matrix& plan, const Matrix& targets);

// (1/2) (x) [ diag(M g)^{-1} M G X_t ] with g = gamma^2 - 1/2 and
// G = diag(gamma^2), gamma taken per the ball's configured convention
// and the half scalar product applied row-wise.
BarycenterResult gyrobarycenter_map(const Matrix& plan, const Matrix& targets,
                                    const BallParams& ball);
BarycenterResult gyrobarycenter_map(const Matrix& plan, const PointCloud& targets);

// Gyrobarycenter of the whole cloud under uniform weights.
Vector gyromidpoint(const PointCloud& cloud);
Vector gyromidpoint(const Matrix& points, const BallParams& ball);

}  // namespace hyperot

#endif  // HYPEROT_BARYCENTER_HPP
