#include "hyperot/eval.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "hyperot/bures.hpp"
#include "hyperot/otda.hpp"
#include "hyperot/wlinear.hpp"

namespace hyperot {

double hits_at_k(const Matrix& transported, const PointCloud& targets,
                 const MatchPairs& matches, Index k) {
  if (k < 1) throw DimensionError("hits_at_k: k must be >= 1");
  if (matches.empty()) throw DimensionError("hits_at_k: empty match set");
  k = std::min(k, targets.size());

  Index hits = 0;
  std::vector<Index> order(targets.size());
  Vector dist(targets.size());
  for (const auto& [i, j] : matches) {
    if (i < 0 || i >= transported.rows() || j < 0 || j >= targets.size())
      throw DimensionError("hits_at_k: match index out of range");
    const Vector q = transported.row(i).transpose();
    for (Index t = 0; t < targets.size(); ++t)
      dist[t] = distance(q, targets.point(t), targets.ball);
    std::iota(order.begin(), order.end(), Index(0));
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    for (Index r = 0; r < k; ++r)
      if (order[r] == j) {
        ++hits;
        break;
      }
  }
  return 100.0 * double(hits) / double(matches.size());
}

AlignmentTask make_synthetic_task(Index d, Index n, double noise_scale,
                                  std::uint64_t seed, const BallParams& ball) {
  if (n < 2 * (d + 1))
    throw DimensionError("make_synthetic_task: need n >= 2 (d + 1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double s = ball.radius;

  // Mixture of 2-4 wrapped Gaussians for the source.
  const int n_comp = 2 + int(rng() % 3);
  Matrix src_points(n, d);
  {
    std::vector<Vector> means;
    for (int c = 0; c < n_comp; ++c) {
      Vector m(d);
      for (Index k = 0; k < d; ++k) m[k] = normal(rng);
      m *= 0.40 * s * uni(rng) / m.norm();
      means.push_back(m);
    }
    const double sigma = 0.15 * s;
    Index row = 0;
    for (Index i = 0; i < n; ++i) {
      const Vector& mu = means[i % n_comp];
      Vector z(d);
      for (Index k = 0; k < d; ++k) z[k] = sigma * normal(rng);
      src_points.row(row++) = wrap_tangent_two_step(mu, z, ball).transpose();
    }
  }

  // Planted wrapped-linear map with a mild SPD distortion.
  WLinearMap planted;
  planted.ball = ball;
  planted.mu_src = Vector::Zero(d);
  {
    Vector shift(d);
    for (Index k = 0; k < d; ++k) shift[k] = normal(rng);
    shift *= (0.25 + 0.15 * uni(rng)) * s / shift.norm();
    planted.mu_tgt = shift;

    Matrix G(d, d);
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c) G(r, c) = normal(rng);
    const Eigen::HouseholderQR<Matrix> qr(G);
    const Matrix Q = qr.householderQ();
    Vector evals(d);
    for (Index k = 0; k < d; ++k) evals[k] = 0.75 + 0.6 * uni(rng);
    planted.transport = Q * evals.asDiagonal() * Q.transpose();
    planted.transport = 0.5 * (planted.transport + planted.transport.transpose());
  }

  Matrix tgt_points(n, d);
  for (Index i = 0; i < n; ++i) {
    Vector y = w_linear_apply(planted, Vector(src_points.row(i).transpose()));
    if (noise_scale > 0.0) {
      Vector xi(d);
      for (Index k = 0; k < d; ++k) xi[k] = noise_scale * normal(rng);
      y = exp_map(y, xi, ball);
    }
    tgt_points.row(i) = y.transpose();
  }

  AlignmentTask task;
  task.source = make_uniform_cloud(src_points, ball);
  task.target = make_uniform_cloud(tgt_points, ball);
  for (Index i = 0; i < n; ++i) task.matches.emplace_back(i, i);
  return task;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::wlinear: return "wlinear";
    case Method::otda: return "otda";
    case Method::me: return "me";
    case Method::ot_direct_w: return "ot_direct_w";
    case Method::ot_direct_sd: return "ot_direct_sd";
    case Method::euclid_linear: return "euclid_linear";
    case Method::euclid_otda: return "euclid_otda";
    case Method::euclid_me: return "euclid_me";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::wlinear, Method::otda, Method::me, Method::ot_direct_w,
                   Method::ot_direct_sd, Method::euclid_linear, Method::euclid_otda,
                   Method::euclid_me})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

bool method_is_euclidean(Method m) {
  return m == Method::euclid_linear || m == Method::euclid_otda || m == Method::euclid_me;
}

namespace {

PointCloud subcloud(const PointCloud& cloud, const std::vector<Index>& rows) {
  Matrix pts(Index(rows.size()), cloud.dim());
  for (size_t r = 0; r < rows.size(); ++r) pts.row(Index(r)) = cloud.points.row(rows[r]);
  return make_uniform_cloud(pts, cloud.ball);
}

// Closed-form Gaussian transport of the raw coordinates.
Matrix euclid_linear_transform(const PointCloud& src_train, const PointCloud& tgt_train,
                               const Matrix& all_points) {
  auto moments = [](const Matrix& pts) {
    const Vector mu = pts.colwise().mean();
    Matrix centered = pts.rowwise() - mu.transpose();
    Matrix sigma = centered.transpose() * centered / double(pts.rows() - 1);
    return std::make_pair(mu, Matrix(0.5 * (sigma + sigma.transpose())));
  };
  const auto [mu1, s1] = moments(src_train.points);
  const auto [mu2, s2] = moments(tgt_train.points);
  const Matrix T = bures_transport_matrix(s1, s2);
  Matrix out = (all_points.rowwise() - mu1.transpose()) * T.transpose();
  out.rowwise() += mu2.transpose();
  return out;
}

CostMatrix masked_cost(const Manifold& manifold, const PointCloud& src,
                       const PointCloud& tgt, CostKind kind, const MatchPairs& train) {
  CostMatrix C = build_cost_matrix(src.points, tgt.points, kind, manifold.params);
  return apply_supervision(C, train);
}

}  // namespace

MethodOutput run_method(Method method, const PointCloud& source, const PointCloud& target,
                        const MatchPairs& train_pairs, const ProtocolConfig& cfg,
                        std::uint64_t seed) {
  const Manifold manifold = method_is_euclidean(method)
                                ? Manifold::euclidean()
                                : Manifold::poincare(source.ball);
  const CostKind kind = cfg.cost.value_or(manifold.default_cost());
  SinkhornConfig scfg = cfg.sinkhorn;
  scfg.epsilon = cfg.epsilon;

  MethodOutput out;
  switch (method) {
    case Method::wlinear:
    case Method::euclid_linear: {
      std::vector<Index> src_rows, tgt_rows;
      for (const auto& [i, j] : train_pairs) {
        src_rows.push_back(i);
        tgt_rows.push_back(j);
      }
      const PointCloud src_train = subcloud(source, src_rows);
      const PointCloud tgt_train = subcloud(target, tgt_rows);
      if (method == Method::wlinear) {
        const WLinearMap map = fit_w_linear(src_train, tgt_train);
        out.transported = w_linear_apply(map, source.points);
      } else {
        out.transported = euclid_linear_transform(src_train, tgt_train, source.points);
      }
      break;
    }
    case Method::otda:
    case Method::euclid_otda: {
      const CostMatrix C = masked_cost(manifold, source, target, kind, train_pairs);
      const SinkhornResult sk = sinkhorn(source.weights, target.weights, C, scfg);
      const OtdaMap map = otda_fit(manifold, sk.coupling, source, target);
      out.transported = otda_transform(map, source.points);
      out.coupling = sk.coupling.plan;
      break;
    }
    case Method::me:
    case Method::euclid_me: {
      InitConfig icfg;
      icfg.hidden = cfg.hidden;
      icfg.nonlinearity = cfg.nonlinearity;
      icfg.pretrain = cfg.fit_budget;
      icfg.sinkhorn = scfg;
      icfg.cost = kind;
      const Model model = init_map(manifold, cfg.init, source, target, seed, icfg);

      MeConfig mcfg;
      mcfg.eta = cfg.eta;
      if (std::isinf(cfg.eta)) {
        mcfg.drop_data_term = true;
        mcfg.eta = 1.0;
      }
      mcfg.omega = cfg.omega;
      mcfg.epsilon = cfg.epsilon;
      mcfg.max_outer = cfg.me_max_outer;
      mcfg.sinkhorn = scfg;
      mcfg.model_step = cfg.fit_budget;
      const CostMatrix C = masked_cost(manifold, source, target, kind, train_pairs);
      const TrainState state = me_fit(manifold, source, target, model, C, mcfg);
      out.transported = model_forward(manifold, state.model, source.points);
      out.coupling = state.coupling.plan;
      break;
    }
    case Method::ot_direct_w:
    case Method::ot_direct_sd: {
      InitConfig icfg;
      icfg.hidden = cfg.hidden;
      icfg.nonlinearity = cfg.nonlinearity;
      icfg.pretrain = cfg.fit_budget;
      icfg.sinkhorn = scfg;
      icfg.cost = kind;
      const Model model = init_map(manifold, cfg.init, source, target, seed, icfg);

      OtDirectConfig dcfg;
      dcfg.loss = method == Method::ot_direct_w ? OtDirectLoss::entropic
                                                : OtDirectLoss::divergence;
      dcfg.cost = kind;
      dcfg.sinkhorn = scfg;
      dcfg.opt = cfg.fit_budget;
      dcfg.opt.max_iters = cfg.ot_direct_iters;
      dcfg.supervision = train_pairs;
      const OtDirectResult fit = ot_direct_fit(manifold, model, source, target, dcfg);
      out.transported = model_forward(manifold, fit.model, source.points);
      break;
    }
  }

  // Rankings happen under the ball metric, so keep everything inside.
  for (Index i = 0; i < out.transported.rows(); ++i) {
    const Vector row = out.transported.row(i).transpose();
    out.transported.row(i) = clamp_to_ball(row, source.ball).transpose();
  }
  return out;
}

namespace {

MatchPairs reversed(const MatchPairs& pairs) {
  MatchPairs out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.emplace_back(j, i);
  return out;
}

double protocol_direction(const PointCloud& src, const PointCloud& tgt,
                          const MatchPairs& matches, double train_fraction, Method method,
                          int folds, const ProtocolConfig& cfg, Index k,
                          std::uint64_t direction_seed) {
  const Index n = Index(matches.size());
  const Index train_size = std::max<Index>(1, Index(std::lround(train_fraction * double(n))));
  if (Index(folds) * train_size > n)
    throw DimensionError("run_protocol: folds * train slice exceeds the match count");

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(direction_seed);
  std::shuffle(order.begin(), order.end(), rng);

  double hits_sum = 0.0;
  for (int fold = 0; fold < folds; ++fold) {
    MatchPairs train, test;
    const Index lo = Index(fold) * train_size;
    const Index hi = lo + train_size;
    for (Index r = 0; r < n; ++r) {
      const auto& pair = matches[order[r]];
      if (r >= lo && r < hi)
        train.push_back(pair);
      else
        test.push_back(pair);
    }
    const MethodOutput res =
        run_method(method, src, tgt, train, cfg, direction_seed + std::uint64_t(fold));
    hits_sum += hits_at_k(res.transported, tgt, test, k);
  }
  return hits_sum / double(folds);
}

}  // namespace

AlignmentReport run_protocol(const AlignmentTask& task, Method method, int folds,
                             const ProtocolConfig& cfg, Index k) {
  if (folds < 1) throw DimensionError("run_protocol: folds must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  AlignmentReport report;
  report.method = method_name(method);
  report.k = k;
  report.folds = folds;
  report.hits_forward =
      protocol_direction(task.source, task.target, task.matches, task.train_fraction,
                         method, folds, cfg, k, cfg.seed * 2 + 1);
  report.hits_backward =
      protocol_direction(task.target, task.source, reversed(task.matches),
                         task.train_fraction, method, folds, cfg, k, cfg.seed * 2 + 2);

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.config_echo = {
      {"epsilon", std::to_string(cfg.epsilon)}, {"eta", std::to_string(cfg.eta)},
      {"omega", std::to_string(cfg.omega)},     {"init", init_strategy_name(cfg.init)},
      {"seed", std::to_string(cfg.seed)},
  };
  return report;
}

}  // namespace hyperot
