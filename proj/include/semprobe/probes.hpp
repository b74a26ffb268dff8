#pragma once

// The three property detectors: logistic regression, a single-hidden-layer
// perceptron, and top-n neighbourhood of the positive centroid.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "semprobe/dataset.hpp"
#include "semprobe/embedding.hpp"
#include "semprobe/metrics.hpp"
#include "semprobe/optim.hpp"

namespace semprobe {

// floor((d_in + d_out) / 3), at least 1.
std::size_t hidden_layer_size(std::size_t d_in, std::size_t d_out);

// Row-major design matrix with binary labels.
class TrainingSet {
 public:
  TrainingSet(std::size_t dim, std::vector<double> features, std::vector<std::uint8_t> labels);

  static TrainingSet from_rows(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows,
                               std::span<const std::uint8_t> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }
  bool label(std::size_t i) const { return labels_[i] != 0; }
  bool has_both_classes() const;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<std::uint8_t> labels_;
};

struct Prediction {
  bool label;
  double score;  // P(positive)
};

double sigmoid(double z);

// --- logistic regression ---------------------------------------------------

struct LogisticConfig {
  double l2_penalty = 1.0;
  double tolerance = 1e-4;
  std::size_t max_iterations = 100;
};

struct TrainingStatus {
  std::size_t iterations = 0;
  optim::StopReason stop = optim::StopReason::kMaxIterations;
  bool converged = false;
  std::vector<double> loss_history;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogisticConfig config;
  TrainingStatus status;

  std::size_t dim() const { return weights.size(); }
};

// Mean cross-entropy + l2_penalty * |w|^2 / 2 (bias unpenalised). Parameters
// are packed as [w..., b].
class LogisticObjective {
 public:
  LogisticObjective(const TrainingSet& data, double l2_penalty) : data_(data), l2_(l2_penalty) {}
  std::size_t parameter_count() const { return data_.dim() + 1; }
  double operator()(std::span<const double> params, std::span<double> grad) const;

 private:
  const TrainingSet& data_;
  double l2_;
};

LogisticModel train_logistic(const TrainingSet& data, const LogisticConfig& config = {});
Prediction predict_logistic(const LogisticModel& model, std::span<const double> x);
inline Prediction predict_logistic(const LogisticModel& model, const WordVector& x) {
  return predict_logistic(model, x.values());
}

// --- multi-layer perceptron ------------------------------------------------

struct MlpConfig {
  double l2_penalty = 1e-4;
  double tolerance = 1e-4;
  std::size_t max_iterations = 200;
  optim::Method optimizer = optim::Method::kLbfgs;
  // 0 derives the width from hidden_layer_size(dim, 1).
  std::size_t hidden_size = 0;
};

struct MlpModel {
  std::size_t dim = 0;
  std::size_t hidden = 0;
  std::vector<double> hidden_weights;  // hidden x dim, row-major
  std::vector<double> hidden_bias;     // hidden
  std::vector<double> output_weights;  // hidden
  double output_bias = 0.0;
  std::uint64_t seed = 0;
  MlpConfig config;
  TrainingStatus status;
};

// ReLU hidden layer, sigmoid output. Mean cross-entropy + l2_penalty *
// (|W1|^2 + |w2|^2) / 2, biases unpenalised. Parameters are packed as
// [W1 (row-major), b1, w2, b2].
class MlpObjective {
 public:
  MlpObjective(const TrainingSet& data, std::size_t hidden, double l2_penalty)
      : data_(data), hidden_(hidden), l2_(l2_penalty) {}
  std::size_t parameter_count() const { return hidden_ * (data_.dim() + 2) + 1; }
  double operator()(std::span<const double> params, std::span<double> grad) const;

 private:
  const TrainingSet& data_;
  std::size_t hidden_;
  double l2_;
};

// Uniform(-b, b) with b = sqrt(6 / (fan_in + fan_out)) per layer, for weights
// and biases, drawn from a generator seeded with `seed`.
std::vector<double> mlp_initial_parameters(std::size_t dim, std::size_t hidden, std::uint64_t seed);
MlpModel mlp_from_parameters(std::size_t dim, std::size_t hidden, std::span<const double> params);
std::vector<double> mlp_parameters(const MlpModel& model);

MlpModel train_mlp(const TrainingSet& data, const MlpConfig& config, std::uint64_t seed);
Prediction predict_mlp(const MlpModel& model, std::span<const double> x);
inline Prediction predict_mlp(const MlpModel& model, const WordVector& x) {
  return predict_mlp(model, x.values());
}

// --- centroid neighbourhood -------------------------------------------------

struct CentroidModel {
  WordVector centroid;
  std::size_t n = 0;
  CandidatePool pool = CandidatePool::full_vocabulary();
};

CentroidModel fit_centroid(const EmbeddingMatrix& matrix, std::span<const std::string> train_positives,
                           std::size_t n, CandidatePool pool);

// 1-based rank `row` would take in rank_by_cosine(matrix, query, pool): one
// plus the number of other pool members with higher similarity, or equal
// similarity and a lower row index. `row` need not belong to the pool.
std::size_t rank_in_pool(std::span<const double> pool_sims, const CandidatePool& pool, std::size_t row,
                         double row_similarity);

// Centroid rank of every test item, in fold order then test order. `rows`
// maps each fold word to its matrix row. Folds sharing the same training
// positives share one ranking pass.
std::vector<std::size_t> centroid_fold_ranks(const EmbeddingMatrix& matrix, std::span<const Fold> folds,
                                             const std::map<std::string, std::size_t>& rows,
                                             const CandidatePool& pool, std::size_t jobs = 1);

bool predict_centroid(const CentroidModel& model, const EmbeddingMatrix& matrix, std::string_view word);

struct SweepPoint {
  std::size_t n;
  ConfusionCounts counts;
  double f1;
};

struct SweepResult {
  std::size_t best_n = 0;
  double best_f1 = 0.0;
  std::vector<SweepPoint> per_n;
  std::vector<std::string> oov;
};

std::vector<std::size_t> default_n_grid();  // 100, 200, ..., 1000

// Scores one n-grid against the 1-based centroid ranks of held-out items.
SweepResult sweep_ranks(std::span<const std::size_t> ranks, std::span<const std::uint8_t> truth,
                        std::span<const std::size_t> n_values);

// Leave-one-out centroid evaluation for every n; best is the smallest n
// reaching the maximum F1.
SweepResult sweep_n(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                    const CandidatePool& pool, std::span<const std::size_t> n_values,
                    OovPolicy policy = OovPolicy::kSkip, std::size_t jobs = 1);

// --- model files ------------------------------------------------------------

using ProbeModel = std::variant<LogisticModel, MlpModel, CentroidModel>;

void write_model(const ProbeModel& model, std::ostream& out);
ProbeModel read_model(std::istream& in);

}  // namespace semprobe
