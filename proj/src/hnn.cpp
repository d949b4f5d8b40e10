#include "hyperot/hnn.hpp"

#include <random>

namespace hyperot {

void validate_model(const Model& model) {
  if (model.layers.empty()) throw DimensionError("model: no layers");
  for (size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    if (layer.b.size() != layer.W.rows())
      throw DimensionError("model: bias size mismatch in layer " + std::to_string(l));
    if (l > 0 && model.layers[l - 1].W.rows() != layer.W.cols())
      throw DimensionError("model: layer " + std::to_string(l) +
                           " input does not match previous output");
  }
}

Vector wrapped_nonlinearity(const Manifold& manifold, Nonlinearity kind, const Vector& h) {
  if (kind == Nonlinearity::none) return h;
  Vector z = manifold.log0(h);
  if (kind == Nonlinearity::relu)
    z = z.cwiseMax(0.0);
  else
    z = z.array().tanh().matrix();
  return manifold.exp0(z);
}

Vector layer_forward(const Manifold& manifold, const LinearLayer& layer,
                     const Vector& x, bool use_bias) {
  Vector h = manifold.matvec(layer.W, x);
  if (use_bias) h = manifold.add(layer.b, h);
  return h;
}

Vector model_forward(const Manifold& manifold, const Model& model, const Vector& x) {
  Vector h = x;
  for (size_t l = 0; l < model.layers.size(); ++l) {
    h = layer_forward(manifold, model.layers[l], h, model.use_bias);
    if (l + 1 < model.layers.size())
      h = wrapped_nonlinearity(manifold, model.nonlinearity, h);
  }
  return h;
}

Matrix model_forward(const Manifold& manifold, const Model& model, const Matrix& points) {
  Matrix out(points.rows(), model.layers.back().W.rows());
  for (Index i = 0; i < points.rows(); ++i)
    out.row(i) = model_forward(manifold, model, Vector(points.row(i).transpose()))
                     .transpose();
  return out;
}

Model make_model(const std::vector<Index>& dims, Nonlinearity nonlinearity,
                 std::uint64_t seed, bool use_bias) {
  if (dims.size() < 2) throw DimensionError("make_model: need input and output dims");
  Model model;
  model.nonlinearity = nonlinearity;
  model.use_bias = use_bias;
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const Index fan_in = dims[l], fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
    std::uniform_real_distribution<double> uni(-bound, bound);
    LinearLayer layer;
    layer.W.resize(fan_out, fan_in);
    for (Index r = 0; r < fan_out; ++r)
      for (Index c = 0; c < fan_in; ++c) layer.W(r, c) = uni(rng);
    layer.b = Vector::Zero(fan_out);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

}  // namespace hyperot
