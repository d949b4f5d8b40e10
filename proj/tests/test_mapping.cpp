#include <doctest.h>

#include <random>

#include "hyperot/mapping.hpp"
#include "hyperot/ot_direct.hpp"
#include "hyperot/wlinear.hpp"
#include "test_util.hpp"

using namespace hyperot;
using namespace hyperot::testutil;

namespace {

OptimizerConfig quick_fit(int iters = 300, double lr = 0.1) {
  OptimizerConfig cfg;
  cfg.max_iters = iters;
  cfg.lr = lr;
  return cfg;
}

}  // namespace

TEST_CASE("hyperbolic linear layer forward") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(211);

  SUBCASE("identity weights and zero bias act as identity") {
    LinearLayer layer{Matrix::Identity(3, 3), Vector::Zero(3)};
    const Vector x = random_ball_point(rng, 3, ball);
    CHECK((layer_forward(manifold, layer, x) - x).norm() < 1e-12);
  }

  SUBCASE("orthogonal weights act linearly") {
    const Matrix q = random_orthogonal(rng, 3);
    LinearLayer layer{q, Vector::Zero(3)};
    const Vector x = random_ball_point(rng, 3, ball);
    CHECK((layer_forward(manifold, layer, x) - q * x).norm() < 1e-9);
  }

  SUBCASE("random layer composes the two primitives") {
    for (int t = 0; t < 20; ++t) {
      LinearLayer layer{Matrix::Random(3, 3), 0.2 * random_direction(rng, 3)};
      const Vector x = random_ball_point(rng, 3, ball);
      const Vector expect =
          mobius_add(layer.b, mobius_matrix_mul(layer.W, x, ball), ball);
      CHECK((layer_forward(manifold, layer, x) - expect).norm() == 0.0);
    }
  }

  SUBCASE("dimension mismatch throws") {
    LinearLayer layer{Matrix::Identity(2, 2), Vector::Zero(2)};
    CHECK_THROWS_AS((void)layer_forward(manifold, layer, Vector(Vector::Zero(3))),
                    DimensionError);
  }
}

TEST_CASE("model forward pass") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(223);

  SUBCASE("single layer without nonlinearity equals the layer") {
    Model model = make_model({3, 3}, Nonlinearity::relu, 5);
    const Vector x = random_ball_point(rng, 3, ball);
    CHECK((model_forward(manifold, model, x) -
           layer_forward(manifold, model.layers[0], x)).norm() == 0.0);
  }

  SUBCASE("relu wrap is the identity on positive tangent coordinates") {
    Vector h(2);
    h << 0.3, 0.2;  // Log_0 keeps the sign pattern
    const Vector out = wrapped_nonlinearity(manifold, Nonlinearity::relu, h);
    CHECK((out - h).norm() < 1e-12);
  }

  SUBCASE("two layers match a manual composition") {
    Model model = make_model({2, 4, 2}, Nonlinearity::tanh, 13);
    model.layers[0].b = 0.1 * random_direction(rng, 4);
    model.layers[1].b = 0.2 * random_direction(rng, 2);
    const Vector x = random_ball_point(rng, 2, ball);
    const Vector h1 = layer_forward(manifold, model.layers[0], x);
    const Vector h2 = wrapped_nonlinearity(manifold, Nonlinearity::tanh, h1);
    const Vector expect = layer_forward(manifold, model.layers[1], h2);
    CHECK((model_forward(manifold, model, x) - expect).norm() == 0.0);
  }

  SUBCASE("euclidean-mode parity at large radius") {
    const BallParams big(1e4);
    const Manifold big_manifold = Manifold::poincare(big);
    Model model = make_model({3, 3}, Nonlinearity::none, 17);
    model.layers[0].b = random_vector(rng, 3, 0.3);
    for (int t = 0; t < 20; ++t) {
      const Vector x = random_vector(rng, 3, 0.5);
      const Vector hyp = model_forward(big_manifold, model, x);
      const Vector affine = model.layers[0].W * x + model.layers[0].b;
      CHECK((hyp - affine).norm() < 1e-3 * affine.norm());
    }
  }

  SUBCASE("bias-free mode drops the bias") {
    Model model = make_model({3, 3}, Nonlinearity::none, 19, /*use_bias=*/false);
    model.layers[0].b = 0.3 * random_direction(rng, 3);  // should be ignored
    const Vector x = random_ball_point(rng, 3, ball);
    CHECK((model_forward(manifold, model, x) -
           mobius_matrix_mul(model.layers[0].W, x, ball)).norm() == 0.0);
  }
}

TEST_CASE("riemannian step") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(227);

  SUBCASE("zero gradient leaves parameters unchanged") {
    Model model = make_model({2, 2}, Nonlinearity::none, 3);
    model.layers[0].b = 0.2 * random_direction(rng, 2);
    const ModelGrads zeros = zero_grads(model);
    AdamState state = make_adam_state(model);
    for (OptimizerKind kind : {OptimizerKind::rgd, OptimizerKind::radam}) {
      const Model stepped = riemannian_step(manifold, model, zeros, kind, 0.5, &state);
      CHECK((stepped.layers[0].W - model.layers[0].W).norm() == 0.0);
      CHECK((stepped.layers[0].b - model.layers[0].b).norm() == 0.0);
    }
  }

  SUBCASE("one descent step on a squared-distance bias objective") {
    const Vector y = 0.4 * random_direction(rng, 2);
    Model model = make_model({2, 2}, Nonlinearity::none, 5);
    model.layers[0].W = Matrix::Identity(2, 2);
    model.layers[0].b = -0.3 * random_direction(rng, 2);

    auto objective = [&](const Model& m) {
      const double d = distance(m.layers[0].b, y, ball);
      return d * d;
    };
    const double before = objective(model);
    ModelGrads grads = zero_grads(model);
    const double d = distance(model.layers[0].b, y, ball);
    grads[0].b = 2.0 * d * grad_distance(manifold, model.layers[0].b, y).first;

    const Model stepped =
        riemannian_step(manifold, model, grads, OptimizerKind::rgd, 1e-3, nullptr);
    CHECK(objective(stepped) < before);
  }

  SUBCASE("bias stays inside the ball for any step size") {
    Model model = make_model({2, 2}, Nonlinearity::none, 7);
    model.layers[0].b = 0.5 * random_direction(rng, 2);
    ModelGrads grads = zero_grads(model);
    grads[0].b = 50.0 * random_direction(rng, 2);
    for (double lr : {0.1, 10.0, 1000.0}) {
      const Model stepped =
          riemannian_step(manifold, model, grads, OptimizerKind::rgd, lr, nullptr);
      CHECK(stepped.layers[0].b.norm() < 1.0);
    }
  }
}

TEST_CASE("fit to targets") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(229);

  SUBCASE("perfect initial fit stays put") {
    Model model = make_model({2, 2}, Nonlinearity::none, 11);
    const PointCloud src = random_cloud(rng, 10, 2, ball, 0.5);
    const Matrix targets = model_forward(manifold, model, src.points);
    const FitResult res =
        fit_to_targets(manifold, model, src.points, targets, 0.0, Matrix(), quick_fit());
    CHECK(res.loss <= 1e-12);
    CHECK((res.model.layers[0].W - model.layers[0].W).norm() == 0.0);
  }

  SUBCASE("recovers a planted rotation") {
    const Matrix q = random_orthogonal(rng, 2);
    const PointCloud src = random_cloud(rng, 30, 2, ball, 0.6);
    Matrix targets(src.size(), 2);
    for (Index i = 0; i < src.size(); ++i)
      targets.row(i) = mobius_matrix_mul(q, src.point(i), ball).transpose();
    Model model = make_model({2, 2}, Nonlinearity::none, 13);
    const FitResult res = fit_to_targets(manifold, model, src.points, targets, 0.0,
                                         Matrix(), quick_fit(600, 0.1));
    CHECK(res.loss <= 1e-3);
  }

  SUBCASE("dominant regularizer drives the weights to the anchor") {
    const PointCloud src = random_cloud(rng, 15, 2, ball, 0.5);
    const Matrix targets = 0.3 * Matrix::Random(15, 2);
    Model model = make_model({2, 2}, Nonlinearity::none, 17);
    const Matrix anchor = Matrix::Identity(2, 2);
    const FitResult res = fit_to_targets(manifold, model, src.points, targets, 1e4,
                                         anchor, quick_fit(600, 0.1));
    CHECK((res.model.layers[0].W - anchor).norm() <= 1e-2);
  }

  SUBCASE("accepted trace is non-increasing") {
    const PointCloud src = random_cloud(rng, 12, 2, ball, 0.6);
    const Matrix targets = 0.4 * Matrix::Random(12, 2);
    Model model = make_model({2, 2}, Nonlinearity::none, 19);
    const FitResult res = fit_to_targets(manifold, model, src.points, targets, 1e-3,
                                         Matrix(), quick_fit());
    for (size_t i = 1; i < res.trace.size(); ++i)
      CHECK(res.trace[i].second <= res.trace[i - 1].second + 1e-10);
  }
}

TEST_CASE("init strategies") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(233);

  InitConfig icfg;
  icfg.pretrain = quick_fit(600, 0.1);

  SUBCASE("identity init on matched clouds reaches near-zero loss") {
    const PointCloud src = random_cloud(rng, 25, 2, ball, 0.6);
    const Model model = init_map(manifold, InitStrategy::identity, src, src, 1, icfg);
    const double loss = fit_loss(manifold, model, src.points, src.points, 0.0, Matrix());
    CHECK(loss <= 1e-3);
  }

  SUBCASE("procrustes recovers a planted rotation") {
    const Matrix q = random_orthogonal(rng, 3);
    const PointCloud src = random_cloud(rng, 30, 3, ball, 0.6);
    PointCloud tgt = src;
    tgt.points = src.points * q.transpose();
    const Matrix p = procrustes_rotation(src.points, tgt.points);
    CHECK((p - q).norm() <= 1e-6);
  }

  SUBCASE("random init does not pretrain") {
    const PointCloud src = random_cloud(rng, 10, 2, ball);
    const PointCloud tgt = random_cloud(rng, 10, 2, ball);
    const Model a = init_map(manifold, InitStrategy::random, src, tgt, 99, icfg);
    const Model b = make_model({2, 2}, icfg.nonlinearity, 99, icfg.use_bias);
    CHECK((a.layers[0].W - b.layers[0].W).norm() == 0.0);
  }

  SUBCASE("permutation and procrustes need matching sizes") {
    const PointCloud src = random_cloud(rng, 10, 2, ball);
    const PointCloud tgt = random_cloud(rng, 8, 2, ball);
    CHECK_THROWS_AS(
        (void)init_map(manifold, InitStrategy::permutation, src, tgt, 1, icfg),
        DimensionError);
    CHECK_THROWS_AS(
        (void)init_map(manifold, InitStrategy::procrustes, src, tgt, 1, icfg),
        DimensionError);
  }

  SUBCASE("barycentric init equals one coupling-then-model pass") {
    const PointCloud src = random_cloud(rng, 12, 2, ball, 0.4);
    const PointCloud tgt = random_cloud(rng, 12, 2, ball, 0.4);
    InitConfig cfg = icfg;
    cfg.sinkhorn.epsilon = 0.05;
    cfg.sinkhorn.max_iters = 2000;
    const Model via_init =
        init_map(manifold, InitStrategy::gyrobarycenter, src, tgt, 7, cfg);

    MeConfig mcfg;
    mcfg.drop_data_term = true;
    mcfg.epsilon = 0.05;
    mcfg.omega = 0.0;
    mcfg.max_outer = 1;
    mcfg.sinkhorn = cfg.sinkhorn;
    mcfg.model_step = cfg.pretrain;
    const Model start = make_model({2, 2}, cfg.nonlinearity, 7, cfg.use_bias);
    const CostMatrix C = build_cost_matrix(src, tgt, CostKind::sq_hyperbolic);
    const TrainState state = me_fit(manifold, src, tgt, start, C, mcfg);

    CHECK((via_init.layers[0].W - state.model.layers[0].W).norm() < 1e-12);
    CHECK((via_init.layers[0].b - state.model.layers[0].b).norm() < 1e-12);
  }
}

TEST_CASE("block coordinate descent estimation") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(239);

  // Compact planted task in the fast-convergence regime.
  const Index n = 16, d = 2;
  const PointCloud src = random_cloud(rng, n, d, ball, 0.35);
  WLinearMap planted;
  planted.ball = ball;
  planted.mu_src = Vector::Zero(d);
  planted.mu_tgt = 0.25 * random_direction(rng, d);
  planted.transport = random_spd(rng, d, 0.8, 1.25);
  PointCloud tgt = src;
  tgt.points = w_linear_apply(planted, src.points);

  MatchPairs train;
  for (Index i = 0; i < n; i += 10) train.emplace_back(i, i);
  CostMatrix C = build_cost_matrix(src, tgt, CostKind::sq_hyperbolic);
  C = apply_supervision(C, train);

  MeConfig cfg;
  cfg.epsilon = 0.05;
  cfg.eta = 1.0;
  cfg.omega = 1e-3;
  cfg.max_outer = 20;
  cfg.outer_rel_tol = 0.0;  // run all outer iterations
  cfg.sinkhorn.epsilon = 0.05;
  cfg.sinkhorn.max_iters = 2000;
  cfg.model_step = quick_fit(120, 0.1);

  SUBCASE("trace is monotone and iterates stay feasible") {
    const Model model = make_model({d, d}, Nonlinearity::none, 31);
    const TrainState state = me_fit(manifold, src, tgt, model, C, cfg);
    REQUIRE(state.trace.size() >= 2);
    for (size_t i = 1; i < state.trace.size(); ++i)
      CHECK(state.trace[i].second <= state.trace[i - 1].second + 1e-10);
    CHECK(marginal_error(state.coupling.plan, src.weights, tgt.weights) <= 1e-7);
    CHECK(state.coupling.plan.minCoeff() >= 0.0);
  }

  SUBCASE("dropping the data term reproduces the plain coupling") {
    MeConfig inf_cfg = cfg;
    inf_cfg.drop_data_term = true;
    inf_cfg.max_outer = 3;
    const Model model = make_model({d, d}, Nonlinearity::none, 37);
    const TrainState state = me_fit(manifold, src, tgt, model, C, inf_cfg);

    SinkhornConfig scfg = inf_cfg.sinkhorn;
    scfg.epsilon = inf_cfg.epsilon;
    const SinkhornResult plain = sinkhorn(src.weights, tgt.weights, C, scfg);
    CHECK((state.coupling.plan - plain.coupling.plan).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("direct OT-loss minimization") {
  const BallParams ball(1.0);
  const Manifold manifold = Manifold::poincare(ball);
  std::mt19937_64 rng(241);

  const Index n = 16, d = 2;
  const PointCloud src = random_cloud(rng, n, d, ball, 0.35);

  SUBCASE("identity-matched clouds stay stable under identity init") {
    InitConfig icfg;
    icfg.pretrain = quick_fit(600, 0.1);
    icfg.sinkhorn.epsilon = 0.05;
    const Model model = init_map(manifold, InitStrategy::identity, src, src, 3, icfg);

    OtDirectConfig dcfg;
    dcfg.loss = OtDirectLoss::divergence;  // vanishes at equality
    dcfg.sinkhorn.epsilon = 0.05;
    dcfg.sinkhorn.max_iters = 2000;
    dcfg.opt = quick_fit(30, 0.05);
    const OtDirectResult res = ot_direct_fit(manifold, model, src, src, dcfg);
    CHECK(std::abs(res.initial_loss) <= 1e-3);
    CHECK(res.final_loss <= res.initial_loss + 1e-12);
    // The mapped cloud keeps matching the target cloud closely.
    const Matrix mapped = model_forward(manifold, res.model, src.points);
    double worst = 0.0;
    for (Index i = 0; i < n; ++i)
      worst = std::max(worst,
                       distance(Vector(mapped.row(i).transpose()), src.point(i), ball));
    CHECK(worst <= 0.05);
  }

  SUBCASE("planted shift improves the divergence by at least half") {
    WLinearMap planted;
    planted.ball = ball;
    planted.mu_src = Vector::Zero(d);
    planted.mu_tgt = 0.3 * random_direction(rng, d);
    planted.transport = random_spd(rng, d, 0.85, 1.2);
    PointCloud tgt = src;
    tgt.points = w_linear_apply(planted, src.points);

    InitConfig icfg;
    icfg.pretrain = quick_fit(300, 0.1);
    icfg.sinkhorn.epsilon = 0.05;
    icfg.sinkhorn.max_iters = 2000;
    const Model model =
        init_map(manifold, InitStrategy::gyrobarycenter, src, tgt, 5, icfg);

    OtDirectConfig dcfg;
    dcfg.loss = OtDirectLoss::divergence;
    dcfg.sinkhorn.epsilon = 0.05;
    dcfg.sinkhorn.max_iters = 2000;
    dcfg.opt = quick_fit(80, 0.05);
    const OtDirectResult res = ot_direct_fit(manifold, model, src, tgt, dcfg);
    CHECK(res.final_loss <= 0.5 * res.initial_loss);
    for (size_t i = 1; i < res.trace.size(); ++i)
      CHECK(res.trace[i].second <= res.trace[i - 1].second + 1e-12);
  }
}
