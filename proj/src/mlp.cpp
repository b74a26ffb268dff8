#include <cmath>
#include <random>

#include "semprobe/errors.hpp"
#include "semprobe/kernels.hpp"
#include "semprobe/probes.hpp"

namespace semprobe {
namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Layout {
  std::size_t dim;
  std::size_t hidden;

  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * dim; }
  std::size_t w2() const { return hidden * dim + hidden; }
  std::size_t b2() const { return hidden * dim + 2 * hidden; }
  std::size_t total() const { return hidden * (dim + 2) + 1; }
};

}  // namespace

double MlpObjective::operator()(std::span<const double> params, std::span<double> grad) const {
  const Layout L{data_.dim(), hidden_};
  const std::size_t d = L.dim;
  const std::size_t h = L.hidden;
  const std::size_t n = data_.size();
  const auto& k = kernels::active();

  const double* W1 = params.data() + L.w1();
  const double* b1 = params.data() + L.b1();
  const double* w2 = params.data() + L.w2();
  const double b2 = params[L.b2()];
  double* gW1 = grad.data() + L.w1();
  double* gb1 = grad.data() + L.b1();
  double* gw2 = grad.data() + L.w2();
  std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<double> act(h);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  double gb2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = data_.row(i).data();
    for (std::size_t j = 0; j < h; ++j) {
      const double a = k.dot_f64(W1 + j * d, x, d) + b1[j];
      act[j] = a > 0.0 ? a : 0.0;
    }
    const double z = k.dot_f64(w2, act.data(), h) + b2;
    const double y = data_.label(i) ? 1.0 : 0.0;
    loss += softplus(z) - y * z;

    const double dz = (sigmoid(z) - y) * inv_n;
    gb2 += dz;
    k.axpy_f64(dz, act.data(), gw2, h);
    for (std::size_t j = 0; j < h; ++j) {
      if (act[j] <= 0.0) continue;
      const double dh = dz * w2[j];
      k.axpy_f64(dh, x, gW1 + j * d, d);
      gb1[j] += dh;
    }
  }
  loss *= inv_n;
  loss += 0.5 * l2_ * (k.dot_f64(W1, W1, h * d) + k.dot_f64(w2, w2, h));
  k.axpy_f64(l2_, W1, gW1, h * d);
  k.axpy_f64(l2_, w2, gw2, h);
  grad[L.b2()] = gb2;
  return loss;
}

std::vector<double> mlp_initial_parameters(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  const Layout L{dim, hidden};
  std::vector<double> params(L.total());
  std::mt19937_64 rng(seed);
  const double bound1 = std::sqrt(6.0 / static_cast<double>(dim + hidden));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> layer1(-bound1, bound1);
  std::uniform_real_distribution<double> layer2(-bound2, bound2);
  for (std::size_t i = L.w1(); i < L.w2(); ++i) params[i] = layer1(rng);  // W1 then b1
  for (std::size_t i = L.w2(); i < L.total(); ++i) params[i] = layer2(rng);  // w2 then b2
  return params;
}

MlpModel mlp_from_parameters(std::size_t dim, std::size_t hidden, std::span<const double> params) {
  const Layout L{dim, hidden};
  if (params.size() != L.total()) throw DimensionError("parameter vector does not match network shape");
  MlpModel m;
  m.dim = dim;
  m.hidden = hidden;
  m.hidden_weights.assign(params.begin() + L.w1(), params.begin() + L.b1());
  m.hidden_bias.assign(params.begin() + L.b1(), params.begin() + L.w2());
  m.output_weights.assign(params.begin() + L.w2(), params.begin() + L.b2());
  m.output_bias = params[L.b2()];
  return m;
}

std::vector<double> mlp_parameters(const MlpModel& model) {
  std::vector<double> p;
  p.reserve(Layout{model.dim, model.hidden}.total());
  p.insert(p.end(), model.hidden_weights.begin(), model.hidden_weights.end());
  p.insert(p.end(), model.hidden_bias.begin(), model.hidden_bias.end());
  p.insert(p.end(), model.output_weights.begin(), model.output_weights.end());
  p.push_back(model.output_bias);
  return p;
}

MlpModel train_mlp(const TrainingSet& data, const MlpConfig& config, std::uint64_t seed) {
  if (data.size() < 2 || !data.has_both_classes()) throw SingleClassError();
  const std::size_t hidden = config.hidden_size != 0 ? config.hidden_size : hidden_layer_size(data.dim(), 1);
  const MlpObjective objective(data, hidden, config.l2_penalty);
  optim::Options options;
  options.method = config.optimizer;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.tolerance;
  auto result = optim::minimize(objective, mlp_initial_parameters(data.dim(), hidden, seed), options);

  MlpModel model = mlp_from_parameters(data.dim(), hidden, result.x);
  model.seed = seed;
  model.config = config;
  model.status = {result.iterations, result.reason, result.converged(), std::move(result.loss_history)};
  return model;
}

Prediction predict_mlp(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw DimensionError("network has input dim " + std::to_string(model.dim) + ", input has " +
                         std::to_string(x.size()));
  }
  const auto& k = kernels::active();
  std::vector<double> act(model.hidden);
  for (std::size_t j = 0; j < model.hidden; ++j) {
    const double a = k.dot_f64(model.hidden_weights.data() + j * model.dim, x.data(), model.dim) +
                     model.hidden_bias[j];
    act[j] = a > 0.0 ? a : 0.0;
  }
  const double z = k.dot_f64(model.output_weights.data(), act.data(), model.hidden) + model.output_bias;
  return {z >= 0.0, sigmoid(z)};
}

}  // namespace semprobe
