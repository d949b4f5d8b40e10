#ifndef HYPEROT_BALL_HPP
#define HYPEROT_BALL_HPP

// Mobius gyrovector operations on the Poincare ball of radius s.
//
// Points are plain Eigen vectors with ||x|| < s. Every operation that
// returns a point clamps the result to ||x|| <= s*(1 - boundary_margin),
// and every atanh argument is clamped below 1, so the functions stay
// finite arbitrarily close to the boundary.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "hyperot/errors.hpp"

namespace hyperot {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VecX<double>;
using Matrix = MatX<double>;
using Index = Eigen::Index;

// Which gamma factor gyrobarycentric weights use. "lorentz" is the
// standard 1/sqrt(1 - ||x||^2/s^2) (limit 1 as s grows); "conformal"
// uses the conformal factor 2/(1 - ||x||^2/s^2) (limit 2), which is the
// reading under which the gyrobarycenter tends to 4/7 of the Euclidean
// barycenter.
enum class GammaConvention { lorentz, conformal };

template <typename Scalar>
struct BallParamsT {
  Scalar radius{1};                 // s
  Scalar boundary_margin{1e-9};     // points kept at norm <= s*(1 - margin)
  GammaConvention gamma_convention = GammaConvention::lorentz;

  BallParamsT() = default;
  explicit BallParamsT(Scalar s, Scalar margin = Scalar(1e-9),
                       GammaConvention conv = GammaConvention::lorentz)
      : radius(s), boundary_margin(margin), gamma_convention(conv) {
    if (!(radius > Scalar(0)))
      throw DimensionError("ball radius must be positive");
    if (!(boundary_margin > Scalar(0)) || !(boundary_margin < Scalar(1e-3)))
      throw DimensionError("boundary margin must lie in (0, 1e-3)");
  }

  Scalar max_norm() const { return radius * (Scalar(1) - boundary_margin); }

  bool same_ball(const BallParamsT& other) const {
    return radius == other.radius;
  }
};

using BallParams = BallParamsT<double>;

namespace detail {

// atanh with its argument clamped into [-1 + 1e-15, 1 - 1e-15].
template <typename Scalar>
Scalar safe_atanh(Scalar t) {
  const Scalar lim = Scalar(1) - Scalar(1e-15);
  if (t > lim) t = lim;
  if (t < -lim) t = -lim;
  return std::atanh(t);
}

}  // namespace detail

// Rescale x onto norm <= s*(1 - margin). Identity for interior points.
template <typename Scalar>
VecX<Scalar> clamp_to_ball(const VecX<Scalar>& x, const BallParamsT<Scalar>& ball) {
  const Scalar n = x.norm();
  const Scalar bound = ball.max_norm();
  if (n > bound) return x * (bound / n);
  return x;
}

// lambda_x = 2 / (1 - ||x||^2 / s^2), the conformal factor of the metric.
template <typename Scalar>
Scalar conformal_factor(const VecX<Scalar>& x, const BallParamsT<Scalar>& ball) {
  const Scalar s2 = ball.radius * ball.radius;
  Scalar denom = Scalar(1) - x.squaredNorm() / s2;
  if (denom < Scalar(1e-15)) denom = Scalar(1e-15);
  return Scalar(2) / denom;
}

// gamma_x = 1 / sqrt(1 - ||x||^2 / s^2).
template <typename Scalar>
Scalar lorentz_gamma(const VecX<Scalar>& x, const BallParamsT<Scalar>& ball) {
  const Scalar s2 = ball.radius * ball.radius;
  Scalar denom = Scalar(1) - x.squaredNorm() / s2;
  if (denom < Scalar(1e-15)) denom = Scalar(1e-15);
  return Scalar(1) / std::sqrt(denom);
}

// Gamma factor per the ball's configured convention.
template <typename Scalar>
Scalar gamma_factor(const VecX<Scalar>& x, const BallParamsT<Scalar>& ball) {
  return ball.gamma_convention == GammaConvention::lorentz
             ? lorentz_gamma(x, ball)
             : conformal_factor(x, ball);
}

// x (+) y. All quadratic terms carry s^2 (s^4 in the denominator).
template <typename Scalar>
VecX<Scalar> mobius_add(const VecX<Scalar>& x, const VecX<Scalar>& y,
                        const BallParamsT<Scalar>& ball) {
  if (x.size() != y.size())
    throw DimensionError("mobius_add: dimension mismatch (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  const Scalar s2 = ball.radius * ball.radius;
  const Scalar xy = x.dot(y);
  const Scalar nx2 = x.squaredNorm();
  const Scalar ny2 = y.squaredNorm();
  const Scalar a = Scalar(1) + (Scalar(2) * xy + ny2) / s2;
  const Scalar c = Scalar(1) - nx2 / s2;
  const Scalar den = Scalar(1) + Scalar(2) * xy / s2 + nx2 * ny2 / (s2 * s2);
  VecX<Scalar> out = (a * x + c * y) / den;
  return clamp_to_ball(out, ball);
}

// r (x) x = s tanh(r atanh(||x||/s)) x/||x||, with 0 mapped to 0.
template <typename Scalar>
VecX<Scalar> mobius_scalar_mul(Scalar r, const VecX<Scalar>& x,
                               const BallParamsT<Scalar>& ball) {
  const Scalar n = x.norm();
  if (n == Scalar(0)) return VecX<Scalar>::Zero(x.size());
  const Scalar t = std::tanh(r * detail::safe_atanh(n / ball.radius));
  VecX<Scalar> out = (ball.radius * t / n) * x;
  return clamp_to_ball(out, ball);
}

// Q (x) x = s tanh(||Qx||/||x|| atanh(||x||/s)) Qx/||Qx||; 0 when Qx = 0.
template <typename Scalar>
VecX<Scalar> mobius_matrix_mul(const MatX<Scalar>& Q, const VecX<Scalar>& x,
                               const BallParamsT<Scalar>& ball) {
  if (Q.cols() != x.size())
    throw DimensionError("mobius_matrix_mul: matrix has " +
                         std::to_string(Q.cols()) + " columns, point has " +
                         std::to_string(x.size()));
  const Scalar nx = x.norm();
  if (nx == Scalar(0)) return VecX<Scalar>::Zero(Q.rows());
  VecX<Scalar> qx = Q * x;
  const Scalar nqx = qx.norm();
  if (nqx == Scalar(0)) return VecX<Scalar>::Zero(Q.rows());
  const Scalar t = std::tanh((nqx / nx) * detail::safe_atanh(nx / ball.radius));
  VecX<Scalar> out = (ball.radius * t / nqx) * qx;
  return clamp_to_ball(out, ball);
}

// d_s(x, y) = 2 s atanh(||(-x) (+) y|| / s).
template <typename Scalar>
Scalar distance(const VecX<Scalar>& x, const VecX<Scalar>& y,
                const BallParamsT<Scalar>& ball) {
  VecX<Scalar> diff = mobius_add<Scalar>(-x, y, ball);
  return Scalar(2) * ball.radius * detail::safe_atanh(diff.norm() / ball.radius);
}

// Equivalent form 2 s asinh(gamma_x gamma_y ||x - y|| / s).
template <typename Scalar>
Scalar distance_sinh_form(const VecX<Scalar>& x, const VecX<Scalar>& y,
                          const BallParamsT<Scalar>& ball) {
  const Scalar gx = lorentz_gamma(x, ball);
  const Scalar gy = lorentz_gamma(y, ball);
  return Scalar(2) * ball.radius * std::asinh(gx * gy * (x - y).norm() / ball.radius);
}

template <typename Scalar>
VecX<Scalar> exp_map(const VecX<Scalar>& x, const VecX<Scalar>& v,
                     const BallParamsT<Scalar>& ball) {
  if (x.size() != v.size())
    throw DimensionError("exp_map: tangent vector dimension mismatch");
  const Scalar nv = v.norm();
  if (nv == Scalar(0)) return x;
  const Scalar lam = conformal_factor(x, ball);
  const Scalar t = std::tanh(lam * nv / (Scalar(2) * ball.radius));
  VecX<Scalar> step = (ball.radius * t / nv) * v;
  return mobius_add(x, step, ball);
}

template <typename Scalar>
VecX<Scalar> log_map(const VecX<Scalar>& x, const VecX<Scalar>& y,
                     const BallParamsT<Scalar>& ball) {
  VecX<Scalar> diff = mobius_add<Scalar>(-x, y, ball);
  const Scalar n = diff.norm();
  if (n == Scalar(0)) return VecX<Scalar>::Zero(x.size());
  const Scalar lam = conformal_factor(x, ball);
  const Scalar t = detail::safe_atanh(n / ball.radius);
  return (Scalar(2) * ball.radius / lam) * (t / n) * diff;
}

// Exp/Log at the origin (lambda_0 = 2 makes them purely radial).
template <typename Scalar>
VecX<Scalar> exp_map_origin(const VecX<Scalar>& v, const BallParamsT<Scalar>& ball) {
  const Scalar n = v.norm();
  if (n == Scalar(0)) return VecX<Scalar>::Zero(v.size());
  VecX<Scalar> out = (ball.radius * std::tanh(n / ball.radius) / n) * v;
  return clamp_to_ball(out, ball);
}

template <typename Scalar>
VecX<Scalar> log_map_origin(const VecX<Scalar>& y, const BallParamsT<Scalar>& ball) {
  const Scalar n = y.norm();
  if (n == Scalar(0)) return VecX<Scalar>::Zero(y.size());
  return (ball.radius * detail::safe_atanh(n / ball.radius) / n) * y;
}

// Tangent vector at the origin carried to base point mu. From the origin
// the gyration is trivial and the transport reduces to the scaling
// lambda_0 / lambda_mu = 2 / lambda_mu.
template <typename Scalar>
VecX<Scalar> parallel_transport_from_origin(const VecX<Scalar>& v,
                                            const VecX<Scalar>& mu,
                                            const BallParamsT<Scalar>& ball) {
  return (Scalar(2) / conformal_factor(mu, ball)) * v;
}

// x (+) (t (x) ((-x) (+) y)); the geodesic through x and y for t in [0,1].
template <typename Scalar>
VecX<Scalar> gyroline(const VecX<Scalar>& x, const VecX<Scalar>& y, Scalar t,
                      const BallParamsT<Scalar>& ball) {
  VecX<Scalar> head = mobius_add<Scalar>(-x, y, ball);
  return mobius_add(x, mobius_scalar_mul(t, head, ball), ball);
}

}  // namespace hyperot

#endif  // HYPEROT_BALL_HPP
