#include <doctest.h>

#include <random>

#include "hyperot/bures.hpp"
#include "hyperot/otda.hpp"
#include "hyperot/wlinear.hpp"
#include "hyperot/exact_ot.hpp"
#include "test_util.hpp"

using namespace hyperot;
using namespace hyperot::testutil;

TEST_CASE("bures transport matrix") {
  std::mt19937_64 rng(5);

  SUBCASE("equal covariances give the identity") {
    const Matrix s = random_spd(rng, 4);
    CHECK((bures_transport_matrix(s, s) - Matrix::Identity(4, 4)).norm() < 1e-10);
  }

  SUBCASE("diagonal case is the entrywise ratio root") {
    Vector d1(3), d2(3);
    d1 << 1.0, 2.0, 0.5;
    d2 << 4.0, 0.5, 2.0;
    const Matrix t = bures_transport_matrix(Matrix(d1.asDiagonal()), Matrix(d2.asDiagonal()));
    for (Index k = 0; k < 3; ++k)
      CHECK(t(k, k) == doctest::Approx(std::sqrt(d2[k] / d1[k])).epsilon(1e-12));
  }

  SUBCASE("riccati residual on random pairs") {
    for (int t = 0; t < 20; ++t) {
      const Matrix s1 = random_spd(rng, 5);
      const Matrix s2 = random_spd(rng, 5);
      const Matrix T = bures_transport_matrix(s1, s2);
      CHECK((T - T.transpose()).norm() < 1e-12);
      CHECK((T * s1 * T - s2).norm() / s2.norm() <= 1e-8);
    }
  }

  SUBCASE("non-spd input throws") {
    Matrix bad = Matrix::Identity(3, 3);
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS((void)bures_transport_matrix(bad, Matrix(Matrix::Identity(3, 3))),
                    NumericalError);
    Matrix asym = Matrix::Identity(3, 3);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS((void)bures_transport_matrix(asym, Matrix(Matrix::Identity(3, 3))),
                    NumericalError);
  }
}

TEST_CASE("wrapped gaussian sampling") {
  const BallParams ball(1.0);
  std::mt19937_64 rng(7);

  SUBCASE("the two constructions coincide") {
    for (int t = 0; t < 100; ++t) {
      const Vector mu = random_ball_point(rng, 3, ball, 0.8);
      const Vector z = random_vector(rng, 3, 0.4);
      const Vector a = wrap_tangent_two_step(mu, z, ball);
      const Vector b = wrap_tangent_direct(mu, z, ball);
      CHECK((a - b).norm() < 1e-12);
    }
  }

  SUBCASE("degenerate covariance pins samples to the bias") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = random_ball_point(rng, 3, ball, 0.5);
    g.sigma = 1e-20 * Matrix::Identity(3, 3);
    const PointCloud cloud = sample_wrapped_gaussian(g, 50, 1);
    for (Index i = 0; i < cloud.size(); ++i)
      CHECK((cloud.point(i) - g.mu).norm() < 1e-8);
  }

  SUBCASE("same seed reproduces the cloud") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = random_ball_point(rng, 2, ball, 0.5);
    g.sigma = random_spd(rng, 2, 0.01, 0.05);
    const PointCloud a = sample_wrapped_gaussian(g, 20, 42);
    const PointCloud b = sample_wrapped_gaussian(g, 20, 42);
    CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("tangent sample covariance recovers sigma at the origin") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = Vector::Zero(3);
    g.sigma = 0.04 * Matrix::Identity(3, 3);
    const PointCloud cloud = sample_wrapped_gaussian(g, 5000, 9);
    Matrix tangent(cloud.size(), 3);
    for (Index i = 0; i < cloud.size(); ++i)
      tangent.row(i) = log_map_origin(cloud.point(i), ball).transpose();
    const Vector mean = tangent.colwise().mean();
    Matrix centered = tangent.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / double(cloud.size() - 1);
    CHECK((cov - g.sigma).norm() / g.sigma.norm() < 0.10);
  }

  SUBCASE("non-spd sigma throws") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = Vector::Zero(2);
    g.sigma = Matrix::Identity(2, 2);
    g.sigma(0, 1) = 0.3;  // asymmetric
    CHECK_THROWS_AS((void)sample_wrapped_gaussian(g, 5, 0), NumericalError);
  }
}

TEST_CASE("wrapped gaussian estimation") {
  const BallParams ball(1.0);
  std::mt19937_64 rng(11);

  SUBCASE("identical samples are rejected as singular") {
    Matrix pts(6, 2);
    const Vector x = random_ball_point(rng, 2, ball, 0.5);
    for (Index i = 0; i < 6; ++i) pts.row(i) = x.transpose();
    const PointCloud cloud = make_uniform_cloud(pts, ball);
    CHECK_THROWS_AS((void)estimate_wrapped_gaussian(cloud), NumericalError);
  }

  SUBCASE("round trip recovers the parameters") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = Vector(3);
    g.mu << 0.25, -0.1, 0.15;
    std::mt19937_64 srng(13);
    g.sigma = random_spd(srng, 3, 0.01, 0.03);
    const PointCloud cloud = sample_wrapped_gaussian(g, 5000, 21);
    const WrappedGaussian est = estimate_wrapped_gaussian(cloud);
    CHECK(distance(est.mu, g.mu, ball) <= 0.05);
    CHECK((est.sigma - g.sigma).norm() / g.sigma.norm() <= 0.10);
  }

  SUBCASE("rotation equivariance") {
    WrappedGaussian g;
    g.ball = ball;
    g.mu = Vector(3);
    g.mu << 0.2, 0.0, -0.1;
    std::mt19937_64 srng(17);
    g.sigma = random_spd(srng, 3, 0.01, 0.04);
    const PointCloud cloud = sample_wrapped_gaussian(g, 3000, 5);
    const Matrix q = random_orthogonal(srng, 3);
    PointCloud rotated = cloud;
    rotated.points = cloud.points * q.transpose();

    const WrappedGaussian base = estimate_wrapped_gaussian(cloud);
    const WrappedGaussian rot = estimate_wrapped_gaussian(rotated);
    CHECK((rot.mu - q * base.mu).norm() < 1e-9);
    CHECK((rot.sigma - q * base.sigma * q.transpose()).norm() < 1e-9);
  }

  SUBCASE("too few samples throw") {
    const PointCloud cloud = random_cloud(rng, 3, 3, ball);
    CHECK_THROWS_AS((void)estimate_wrapped_gaussian(cloud), DimensionError);
  }
}

TEST_CASE("wrapped linear map") {
  const BallParams ball(1.0);
  std::mt19937_64 rng(19);

  SUBCASE("identical clouds give an identity map") {
    const PointCloud cloud = random_cloud(rng, 40, 3, ball, 0.5);
    const WLinearMap map = fit_w_linear(cloud, cloud);
    CHECK((map.mu_src - map.mu_tgt).norm() < 1e-12);
    CHECK((map.transport - Matrix::Identity(3, 3)).norm() < 1e-8);
    for (Index i = 0; i < 5; ++i)
      CHECK((w_linear_apply(map, cloud.point(i)) - cloud.point(i)).norm() < 1e-8);
  }

  SUBCASE("bias point maps to the target bias exactly") {
    const PointCloud a = random_cloud(rng, 30, 3, ball, 0.5);
    const PointCloud b = random_cloud(rng, 30, 3, ball, 0.5);
    const WLinearMap map = fit_w_linear(a, b);
    CHECK((w_linear_apply(map, map.mu_src) - map.mu_tgt).norm() < 1e-12);
  }

  SUBCASE("identity transport with zero biases is the identity") {
    WLinearMap map;
    map.ball = ball;
    map.mu_src = Vector::Zero(3);
    map.mu_tgt = Vector::Zero(3);
    map.transport = Matrix::Identity(3, 3);
    const Vector x = random_ball_point(rng, 3, ball);
    CHECK((w_linear_apply(map, x) - x).norm() < 1e-12);
  }

  SUBCASE("pushforward recovery of a planted map") {
    WrappedGaussian src;
    src.ball = ball;
    src.mu = Vector(3);
    src.mu << 0.1, -0.05, 0.0;
    std::mt19937_64 srng(23);
    src.sigma = random_spd(srng, 3, 0.01, 0.03);

    WLinearMap planted;
    planted.ball = ball;
    planted.mu_src = src.mu;
    planted.mu_tgt = Vector(3);
    planted.mu_tgt << -0.2, 0.15, 0.1;
    planted.transport = random_spd(srng, 3, 0.8, 1.3);

    const PointCloud xs = sample_wrapped_gaussian(src, 5000, 31);
    PointCloud ys = xs;
    ys.points = w_linear_apply(planted, xs.points);

    const WLinearMap fitted = fit_w_linear(xs, ys);
    CHECK((fitted.transport - planted.transport).norm() / planted.transport.norm() <= 0.10);

    // Transported fresh samples carry the planted target covariance.
    const PointCloud fresh = sample_wrapped_gaussian(src, 5000, 77);
    PointCloud moved = fresh;
    moved.points = w_linear_apply(fitted, fresh.points);
    const WrappedGaussian est = estimate_wrapped_gaussian(moved);
    const Matrix expected =
        planted.transport * src.sigma * planted.transport;  // T Sigma T
    CHECK((est.sigma - expected).norm() / expected.norm() <= 0.10);
  }

  SUBCASE("one-dimensional closed form") {
    // On a 1-d ball the transport scalar is sqrt(var_t / var_s).
    WrappedGaussian src;
    src.ball = ball;
    src.mu = Vector::Constant(1, 0.05);
    src.sigma = Matrix::Constant(1, 1, 0.02);
    const PointCloud xs = sample_wrapped_gaussian(src, 4000, 3);

    WLinearMap planted;
    planted.ball = ball;
    planted.mu_src = src.mu;
    planted.mu_tgt = Vector::Constant(1, -0.2);
    planted.transport = Matrix::Constant(1, 1, 1.4);
    PointCloud ys = xs;
    ys.points = w_linear_apply(planted, xs.points);

    const WrappedGaussian gs = estimate_wrapped_gaussian(xs);
    const WrappedGaussian gt = estimate_wrapped_gaussian(ys);
    const WLinearMap fitted = fit_w_linear(xs, ys);
    CHECK(fitted.transport(0, 0) ==
          doctest::Approx(std::sqrt(gt.sigma(0, 0) / gs.sigma(0, 0))).epsilon(1e-9));
    CHECK(fitted.transport(0, 0) == doctest::Approx(1.4).epsilon(0.1));
  }

  SUBCASE("euclidean limit of the application") {
    const BallParams big(1e4);
    WLinearMap map;
    map.ball = big;
    std::mt19937_64 srng(41);
    map.mu_src = random_vector(srng, 3, 0.3);
    map.mu_tgt = random_vector(srng, 3, 0.3);
    map.transport = random_spd(srng, 3, 0.7, 1.4);
    for (int t = 0; t < 50; ++t) {
      const Vector x = random_vector(srng, 3, 0.5);
      const Vector hyp = w_linear_apply(map, x);
      const Vector affine = map.mu_tgt + map.transport * (x - map.mu_src);
      CHECK((hyp - affine).norm() < 1e-3 * affine.norm());
    }
  }
}

TEST_CASE("nearest-neighbor transport") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(47);

  const PointCloud src = random_cloud(rng, 8, 2, ball, 0.6);
  const PointCloud tgt = random_cloud(rng, 8, 2, ball, 0.6);
  const CostMatrix C = build_cost_matrix(src, tgt, CostKind::sq_hyperbolic);
  SinkhornConfig cfg;
  const SinkhornResult sk = sinkhorn(src.weights, tgt.weights, C, cfg);
  const OtdaMap map = otda_fit(manifold, sk.coupling, src, tgt);

  SUBCASE("training points map exactly to their stored images") {
    for (Index i = 0; i < src.size(); ++i) {
      const Vector out = otda_transform(map, src.point(i));
      CHECK((out - map.images.row(i).transpose()).norm() <= 1e-12);
    }
  }

  SUBCASE("queries match the hand-composed formula") {
    for (int t = 0; t < 30; ++t) {
      const Vector x = random_ball_point(rng, 2, ball, 0.7);
      Index nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < src.size(); ++i) {
        const double d = distance(x, src.point(i), ball);
        if (d < best) {
          best = d;
          nearest = i;
        }
      }
      const Vector expect = mobius_add(
          Vector(map.images.row(nearest).transpose()),
          mobius_add(Vector(-src.point(nearest)), x, ball), ball);
      CHECK((otda_transform(map, x) - expect).norm() < 1e-14);
    }
  }

  SUBCASE("single training point gives a global translation") {
    Matrix one_src(1, 2), one_tgt(1, 2);
    one_src.row(0) = src.points.row(0);
    one_tgt.row(0) = tgt.points.row(0);
    const PointCloud s1 = make_uniform_cloud(one_src, ball);
    const PointCloud t1 = make_uniform_cloud(one_tgt, ball);
    Coupling coupling;
    coupling.plan = Matrix::Constant(1, 1, 1.0);
    coupling.row_marginal = Vector::Ones(1);
    coupling.col_marginal = Vector::Ones(1);
    const OtdaMap m1 = otda_fit(manifold, coupling, s1, t1);
    const Vector x = random_ball_point(rng, 2, ball);
    const Vector expect =
        mobius_add(Vector(m1.images.row(0).transpose()),
                   mobius_add(Vector(-s1.point(0)), x, ball), ball);
    CHECK((otda_transform(m1, x) - expect).norm() == 0.0);
  }

  SUBCASE("empty training set throws") {
    OtdaMap empty;
    empty.manifold = manifold;
    CHECK_THROWS_AS((void)otda_transform(empty, Vector(Vector::Zero(2))), DimensionError);
  }
}
