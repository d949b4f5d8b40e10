#include "hyperot/grad.hpp"

#include <cmath>

namespace hyperot {

namespace {

constexpr double kTiny = 1e-12;

// Pullback through a radial map f(x) = g(||x||) x / ||x||:
//   xbar = (g/rho) vbar + (g' - g/rho) (xhat . vbar) xhat.
Vector radial_vjp(const Vector& x, const Vector& vbar, double g_over_rho,
                  double gprime) {
  const double rho = x.norm();
  if (rho < kTiny) return gprime * vbar;
  const Vector xhat = x / rho;
  return g_over_rho * vbar + (gprime - g_over_rho) * xhat.dot(vbar) * xhat;
}

double relu_deriv(double z) { return z > 0.0 ? 1.0 : 0.0; }

}  // namespace

Vector riemannian_grad(const Vector& euclid_grad, const Vector& x,
                       const BallParams& ball) {
  const double lam = conformal_factor(x, ball);
  return euclid_grad / (lam * lam);
}

std::pair<Vector, Vector> grad_distance(const Manifold& manifold, const Vector& x,
                                        const Vector& y) {
  const double d = manifold.distance(x, y);
  if (d < kTiny)
    return {Vector::Zero(x.size()), Vector::Zero(y.size())};
  if (!manifold.hyperbolic()) {
    const Vector g = (x - y) / d;
    return {g, Vector(-g)};
  }
  const BallParams& ball = manifold.params;
  const double lx = conformal_factor(x, ball);
  const double ly = conformal_factor(y, ball);
  const Vector gx = -(lx * lx / d) * log_map(x, y, ball);
  const Vector gy = -(ly * ly / d) * log_map(y, x, ball);
  return {gx, gy};
}

std::pair<Vector, Vector> vjp_mobius_add(const Vector& x, const Vector& y,
                                         const Vector& vbar, const BallParams& ball) {
  const double s2 = ball.radius * ball.radius;
  const double xy = x.dot(y);
  const double nx2 = x.squaredNorm();
  const double ny2 = y.squaredNorm();
  const double a = 1.0 + (2.0 * xy + ny2) / s2;
  const double c = 1.0 - nx2 / s2;
  const double den = 1.0 + 2.0 * xy / s2 + nx2 * ny2 / (s2 * s2);
  const Vector num = a * x + c * y;

  const Vector da_dx = (2.0 / s2) * y;
  const Vector da_dy = (2.0 / s2) * (x + y);
  const Vector dc_dx = (-2.0 / s2) * x;
  const Vector dden_dx = (2.0 / s2) * y + (2.0 * ny2 / (s2 * s2)) * x;
  const Vector dden_dy = (2.0 / s2) * x + (2.0 * nx2 / (s2 * s2)) * y;

  const double xv = x.dot(vbar);
  const double yv = y.dot(vbar);
  const double nv = num.dot(vbar);

  Vector xbar = (a / den) * vbar + (xv / den) * da_dx + (yv / den) * dc_dx -
                (nv / (den * den)) * dden_dx;
  Vector ybar = (c / den) * vbar + (xv / den) * da_dy - (nv / (den * den)) * dden_dy;
  return {xbar, ybar};
}

std::pair<Matrix, Vector> vjp_mobius_matvec(const Matrix& Q, const Vector& x,
                                            const Vector& vbar, const BallParams& ball) {
  const double s = ball.radius;
  const double rx = x.norm();
  if (rx < kTiny) {
    // Near the origin the map is plain multiplication.
    return {vbar * x.transpose(), Matrix(Q.transpose()) * vbar};
  }
  const Vector u = Q * x;
  const double ru = u.norm();
  const double beta = detail::safe_atanh(rx / s) / rx;
  if (ru < kTiny) {
    const Vector ubar = (s * beta) * vbar;
    return {ubar * x.transpose(), Matrix(Q.transpose()) * ubar};
  }

  const double t = std::tanh(beta * ru);
  const double sech2 = 1.0 - t * t;
  const double g_over_rho = s * t / ru;
  const double gprime_u = s * beta * sech2;
  const Vector ubar = radial_vjp(u, vbar, g_over_rho, gprime_u);

  // Dependence on x through beta(||x||).
  const double dbeta =
      1.0 / (rx * s * (1.0 - rx * rx / (s * s))) - detail::safe_atanh(rx / s) / (rx * rx);
  const Vector uhat = u / ru;
  const Vector xbar_direct = vbar.dot(uhat) * s * sech2 * ru * dbeta * (x / rx);

  Vector xbar = Q.transpose() * ubar + xbar_direct;
  return {ubar * x.transpose(), xbar};
}

Vector vjp_mobius_scalar_mul(double r, const Vector& q, const Vector& vbar,
                             const BallParams& ball) {
  const double s = ball.radius;
  const double rho = q.norm();
  if (rho < kTiny) return r * vbar;
  const double arg = r * detail::safe_atanh(rho / s);
  const double t = std::tanh(arg);
  const double g_over_rho = s * t / rho;
  const double gprime = r * (1.0 - t * t) / (1.0 - rho * rho / (s * s));
  return radial_vjp(q, vbar, g_over_rho, gprime);
}

Vector vjp_exp_origin(const Vector& v, const Vector& vbar, const BallParams& ball) {
  const double s = ball.radius;
  const double rho = v.norm();
  if (rho < kTiny) return vbar;
  const double t = std::tanh(rho / s);
  return radial_vjp(v, vbar, s * t / rho, 1.0 - t * t);
}

Vector vjp_log_origin(const Vector& y, const Vector& vbar, const BallParams& ball) {
  const double s = ball.radius;
  const double rho = y.norm();
  if (rho < kTiny) return vbar;
  const double g_over_rho = s * detail::safe_atanh(rho / s) / rho;
  const double gprime = 1.0 / (1.0 - rho * rho / (s * s));
  return radial_vjp(y, vbar, g_over_rho, gprime);
}

ModelGrads zero_grads(const Model& model) {
  ModelGrads grads;
  grads.reserve(model.layers.size());
  for (const auto& layer : model.layers)
    grads.push_back({Matrix::Zero(layer.W.rows(), layer.W.cols()),
                     Vector::Zero(layer.b.size())});
  return grads;
}

Vector model_forward_tape(const Manifold& manifold, const Model& model,
                          const Vector& x, ModelTape& tape) {
  const size_t L = model.layers.size();
  tape.inputs.assign(L, Vector());
  tape.matvec_out.assign(L, Vector());
  tape.preact.assign(L, Vector());
  tape.tangent.assign(L, Vector());

  Vector h = x;
  for (size_t l = 0; l < L; ++l) {
    const auto& layer = model.layers[l];
    tape.inputs[l] = h;
    Vector mm = manifold.matvec(layer.W, h);
    tape.matvec_out[l] = mm;
    Vector pre = model.use_bias ? manifold.add(layer.b, mm) : mm;
    tape.preact[l] = pre;
    if (l + 1 < L && model.nonlinearity != Nonlinearity::none) {
      Vector z = manifold.log0(pre);
      tape.tangent[l] = z;
      Vector w = model.nonlinearity == Nonlinearity::relu
                     ? Vector(z.cwiseMax(0.0))
                     : Vector(z.array().tanh().matrix());
      h = manifold.exp0(w);
    } else {
      h = pre;
    }
  }
  tape.output = h;
  return h;
}

Vector model_backward(const Manifold& manifold, const Model& model,
                      const ModelTape& tape, const Vector& out_bar, ModelGrads& grads) {
  const size_t L = model.layers.size();
  Vector hbar = out_bar;
  for (size_t l = L; l-- > 0;) {
    const auto& layer = model.layers[l];
    if (l + 1 < L && model.nonlinearity != Nonlinearity::none) {
      const Vector& z = tape.tangent[l];
      Vector w = model.nonlinearity == Nonlinearity::relu
                     ? Vector(z.cwiseMax(0.0))
                     : Vector(z.array().tanh().matrix());
      Vector wbar = manifold.hyperbolic() ? vjp_exp_origin(w, hbar, manifold.params) : hbar;
      Vector zbar(z.size());
      for (Index k = 0; k < z.size(); ++k) {
        const double dz = model.nonlinearity == Nonlinearity::relu
                              ? relu_deriv(z[k])
                              : 1.0 - std::tanh(z[k]) * std::tanh(z[k]);
        zbar[k] = dz * wbar[k];
      }
      hbar = manifold.hyperbolic() ? vjp_log_origin(tape.preact[l], zbar, manifold.params)
                                   : zbar;
    }

    Vector mmbar;
    if (model.use_bias) {
      if (manifold.hyperbolic()) {
        auto [bbar, mb] = vjp_mobius_add(layer.b, tape.matvec_out[l], hbar, manifold.params);
        grads[l].b += bbar;
        mmbar = mb;
      } else {
        grads[l].b += hbar;
        mmbar = hbar;
      }
    } else {
      mmbar = hbar;
    }

    if (manifold.hyperbolic()) {
      auto [Wbar, xbar] = vjp_mobius_matvec(layer.W, tape.inputs[l], mmbar, manifold.params);
      grads[l].W += Wbar;
      hbar = xbar;
    } else {
      grads[l].W += mmbar * tape.inputs[l].transpose();
      hbar = layer.W.transpose() * mmbar;
    }
  }
  return hbar;
}

namespace {

double regularizer(const Model& model, double omega, const Matrix& anchor,
                   ModelGrads* grads) {
  if (omega == 0.0) return 0.0;
  double reg = 0.0;
  for (size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& W = model.layers[l].W;
    const bool anchored = anchor.rows() == W.rows() && anchor.cols() == W.cols();
    const Matrix diff = anchored ? Matrix(W - anchor) : W;
    reg += omega * diff.squaredNorm();
    if (grads) (*grads)[l].W += 2.0 * omega * diff;
  }
  return reg;
}

}  // namespace

LossGrads fit_loss_and_grads(const Manifold& manifold, const Model& model,
                             const Matrix& inputs, const Matrix& targets,
                             double omega, const Matrix& reg_anchor) {
  if (inputs.rows() != targets.rows())
    throw DimensionError("fit loss: input and target row counts differ");
  const Index n = inputs.rows();
  LossGrads out;
  out.grads = zero_grads(model);
  ModelTape tape;
  for (Index i = 0; i < n; ++i) {
    const Vector y = model_forward_tape(manifold, model, inputs.row(i).transpose(), tape);
    const Vector t = targets.row(i).transpose();
    out.loss += manifold.distance(y, t) / double(n);
    const Vector out_bar = grad_distance(manifold, y, t).first / double(n);
    model_backward(manifold, model, tape, out_bar, out.grads);
  }
  out.loss += regularizer(model, omega, reg_anchor, &out.grads);
  if (!std::isfinite(out.loss)) throw NumericalError("fit loss: non-finite loss");
  return out;
}

double fit_loss(const Manifold& manifold, const Model& model, const Matrix& inputs,
                const Matrix& targets, double omega, const Matrix& reg_anchor) {
  double loss = 0.0;
  const Index n = inputs.rows();
  for (Index i = 0; i < n; ++i) {
    const Vector y = model_forward(manifold, model, Vector(inputs.row(i).transpose()));
    loss += manifold.distance(y, Vector(targets.row(i).transpose())) / double(n);
  }
  loss += regularizer(model, omega, reg_anchor, nullptr);
  return loss;
}

CouplingGrad coupling_data_grad(const Manifold& manifold, const Matrix& mapped,
                                const Matrix& plan, const Matrix& targets) {
  const Index ns = plan.rows();
  const Index nt = plan.cols();
  const Index d = targets.cols();
  if (mapped.rows() != ns)
    throw DimensionError("coupling gradient: mapped points do not match coupling rows");

  Vector gamma_sq = Vector::Ones(nt);
  Vector g = Vector::Ones(nt);
  if (manifold.hyperbolic()) {
    for (Index j = 0; j < nt; ++j) {
      const double gamma = gamma_factor(Vector(targets.row(j).transpose()), manifold.params);
      gamma_sq[j] = gamma * gamma;
    }
    g = gamma_sq.array() - 0.5;
  }

  CouplingGrad out;
  out.grad.resize(ns, nt);
  out.barycenter.resize(ns, d);
  for (Index i = 0; i < ns; ++i) {
    const double u = plan.row(i).dot(g);
    if (u < 1e-15)
      throw NumericalError("coupling gradient: row " + std::to_string(i) +
                           " has degenerate mass");
    Vector p = Vector::Zero(d);
    for (Index j = 0; j < nt; ++j)
      p += plan(i, j) * gamma_sq[j] * targets.row(j).transpose();
    const Vector q = p / u;
    const Vector B = manifold.hyperbolic()
                         ? mobius_scalar_mul(0.5, q, manifold.params)
                         : q;
    out.barycenter.row(i) = B.transpose();

    const Vector dB =
        grad_distance(manifold, B, mapped.row(i).transpose()).first / double(ns);
    const Vector w = manifold.hyperbolic()
                         ? vjp_mobius_scalar_mul(0.5, q, dB, manifold.params)
                         : dB;
    for (Index j = 0; j < nt; ++j) {
      const Vector dq = (gamma_sq[j] * targets.row(j).transpose() - q * g[j]) / u;
      out.grad(i, j) = w.dot(dq);
    }
  }
  return out;
}

}  // namespace hyperot
