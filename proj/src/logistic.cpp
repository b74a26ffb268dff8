#include <algorithm>
#include <cmath>

#include "semprobe/errors.hpp"
#include "semprobe/kernels.hpp"
#include "semprobe/probes.hpp"

namespace semprobe {

std::size_t hidden_layer_size(std::size_t d_in, std::size_t d_out) {
  return std::max<std::size_t>(1, (d_in + d_out) / 3);
}

TrainingSet::TrainingSet(std::size_t dim, std::vector<double> features, std::vector<std::uint8_t> labels)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)) {
  if (dim_ == 0) throw DimensionError("training set dimension must be positive");
  if (features_.size() != labels_.size() * dim_) {
    throw DimensionError("training set has " + std::to_string(features_.size()) + " features for " +
                         std::to_string(labels_.size()) + " labels of dim " + std::to_string(dim_));
  }
}

TrainingSet TrainingSet::from_rows(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows,
                                   std::span<const std::uint8_t> labels) {
  if (rows.size() != labels.size()) throw DimensionError("rows and labels differ in length");
  std::vector<double> features;
  features.reserve(rows.size() * matrix.dim());
  for (std::size_t r : rows) {
    const auto row = matrix.row(r);
    features.insert(features.end(), row.begin(), row.end());
  }
  return TrainingSet(matrix.dim(), std::move(features), {labels.begin(), labels.end()});
}

bool TrainingSet::has_both_classes() const {
  const auto pos = std::count(labels_.begin(), labels_.end(), std::uint8_t{1});
  return pos > 0 && static_cast<std::size_t>(pos) < labels_.size();
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double LogisticObjective::operator()(std::span<const double> params, std::span<double> grad) const {
  const std::size_t d = data_.dim();
  const std::size_t n = data_.size();
  const auto& k = kernels::active();
  const double* w = params.data();
  const double b = params[d];
  std::fill(grad.begin(), grad.end(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  double grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data_.row(i);
    const double z = k.dot_f64(w, x.data(), d) + b;
    const double y = data_.label(i) ? 1.0 : 0.0;
    loss += softplus(z) - y * z;
    const double residual = (sigmoid(z) - y) * inv_n;
    k.axpy_f64(residual, x.data(), grad.data(), d);
    grad_b += residual;
  }
  loss *= inv_n;
  loss += 0.5 * l2_ * k.dot_f64(w, w, d);
  k.axpy_f64(l2_, w, grad.data(), d);
  grad[d] = grad_b;
  return loss;
}

LogisticModel train_logistic(const TrainingSet& data, const LogisticConfig& config) {
  if (data.size() < 2 || !data.has_both_classes()) throw SingleClassError();
  const LogisticObjective objective(data, config.l2_penalty);
  optim::Options options;
  options.method = optim::Method::kLbfgs;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.tolerance;
  auto result = optim::minimize(objective, std::vector<double>(objective.parameter_count(), 0.0), options);

  LogisticModel model;
  model.bias = result.x.back();
  result.x.pop_back();
  model.weights = std::move(result.x);
  model.config = config;
  model.status = {result.iterations, result.reason, result.converged(), std::move(result.loss_history)};
  return model;
}

Prediction predict_logistic(const LogisticModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw DimensionError("logistic model has dim " + std::to_string(model.dim()) + ", input has " +
                         std::to_string(x.size()));
  }
  const double z = kernels::dot(std::span<const double>(model.weights), x) + model.bias;
  // score >= 0.5 exactly when z >= 0
  return {z >= 0.0, sigmoid(z)};
}

}  // namespace semprobe
