#include "semprobe/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "semprobe/errors.hpp"
#include "semprobe/kernels.hpp"

namespace semprobe {

Scores f1(const ConfusionCounts& c) {
  Scores s;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  s.precision = ratio(c.tp, c.tp + c.fp);
  s.recall = ratio(c.tp, c.tp + c.fn);
  // 2tp / (2tp + fp + fn) equals the harmonic mean and is exact for integers.
  s.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return s;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kNeigh:
      return "neigh";
    case Method::kLr:
      return "lr";
    case Method::kNet:
      return "net";
  }
  return "lr";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "neigh") return Method::kNeigh;
  if (name == "lr") return Method::kLr;
  if (name == "net") return Method::kNet;
  return std::nullopt;
}

double average_pairwise_cosine(const EmbeddingMatrix& matrix, std::span<const std::string> words) {
  std::vector<std::size_t> rows;
  for (const auto& w : words) {
    if (const auto r = matrix.find(w)) rows.push_back(*r);
  }
  if (rows.size() < 2) throw EmptySetError("average pairwise cosine needs at least two resolvable words");
  const auto& k = kernels::active();
  const std::size_t d = matrix.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ni = matrix.norm(rows[i]);
    if (ni == 0.0) throw DegenerateVectorError("zero vector for '" + matrix.token(rows[i]) + "'");
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const double nj = matrix.norm(rows[j]);
      if (nj == 0.0) throw DegenerateVectorError("zero vector for '" + matrix.token(rows[j]) + "'");
      const double c = k.dot_f32(matrix.row(rows[i]).data(), matrix.row(rows[j]).data(), d) / (ni * nj);
      sum += std::clamp(c, -1.0, 1.0);
    }
  }
  const double pairs = static_cast<double>(rows.size()) * static_cast<double>(rows.size() - 1) / 2.0;
  return sum / pairs;
}

namespace {

std::vector<double> mid_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DimensionError("spearman inputs differ in length (" + std::to_string(xs.size()) + " vs " +
                         std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) throw DimensionError("spearman needs at least two points");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw DimensionError("spearman inputs must be finite");
  }
  const auto rx = mid_ranks(xs);
  const auto ry = mid_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mean = (n + 1.0) / 2.0;  // mid-ranks always average to this
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

struct FoldOutcome {
  std::vector<std::uint8_t> predicted;
  bool converged = true;
};

// Training words of a fold with their labels, in lexicographic order.
void training_rows(const Fold& fold, const std::map<std::string, std::size_t>& rows,
                   std::vector<std::size_t>& out_rows, std::vector<std::uint8_t>& out_labels) {
  out_rows.clear();
  out_labels.clear();
  auto p = fold.train_positives.begin();
  auto n = fold.train_negatives.begin();
  while (p != fold.train_positives.end() || n != fold.train_negatives.end()) {
    const bool take_positive =
        n == fold.train_negatives.end() || (p != fold.train_positives.end() && *p < *n);
    out_rows.push_back(rows.at(take_positive ? *p++ : *n++));
    out_labels.push_back(take_positive ? 1 : 0);
  }
}

std::string fold_name(const Fold& fold) {
  if (fold.test.size() == 1) return "holding out '" + fold.test.front().word + "'";
  return "the fixed split";
}

MethodResult evaluate_folds(const EmbeddingMatrix& matrix, const ResolvedDataset& resolved,
                            const std::vector<Fold>& folds, Method method, const EvalConfig& config,
                            std::uint64_t seed) {
  MethodResult result;
  result.method = method;
  result.seed = method == Method::kNet ? seed : 0;
  result.oov = resolved.oov;
  for (const auto& fold : folds) {
    result.items.insert(result.items.end(), fold.test.begin(), fold.test.end());
  }
  std::vector<std::uint8_t> truth;
  truth.reserve(result.items.size());
  for (const auto& item : result.items) truth.push_back(item.positive ? 1 : 0);

  if (method == Method::kNeigh) {
    result.ranks = centroid_fold_ranks(matrix, folds, resolved.rows, config.pool, config.jobs);
    const auto sweep = sweep_ranks(result.ranks, truth, config.n_grid);
    result.best_n = sweep.best_n;
    result.curve = sweep.per_n;
    result.predicted.reserve(result.ranks.size());
    for (std::size_t r : result.ranks) result.predicted.push_back(r <= result.best_n ? 1 : 0);
  } else {
    std::vector<FoldOutcome> outcomes(folds.size());
    detail::parallel_for(folds.size(), config.jobs, [&](std::size_t f) {
      const Fold& fold = folds[f];
      std::vector<std::size_t> rows;
      std::vector<std::uint8_t> labels;
      training_rows(fold, resolved.rows, rows, labels);
      if (fold.train_negatives.empty()) {
        throw DegenerateFoldError(fold_name(fold) + " leaves no training negatives for '" +
                                  resolved.dataset.property() + "'");
      }
      const auto data = TrainingSet::from_rows(matrix, rows, labels);
      FoldOutcome& out = outcomes[f];
      std::vector<double> x(matrix.dim());
      auto test_vector = [&](const LabeledWord& item) {
        const auto row = matrix.row(resolved.rows.at(item.word));
        std::copy(row.begin(), row.end(), x.begin());
        return std::span<const double>(x);
      };
      if (method == Method::kLr) {
        const auto model = train_logistic(data, config.logistic);
        out.converged = model.status.converged;
        for (const auto& item : fold.test) out.predicted.push_back(predict_logistic(model, test_vector(item)).label);
      } else {
        const auto model = train_mlp(data, config.mlp, seed);
        out.converged = model.status.converged;
        for (const auto& item : fold.test) out.predicted.push_back(predict_mlp(model, test_vector(item)).label);
      }
    });
    for (const auto& o : outcomes) {
      result.predicted.insert(result.predicted.end(), o.predicted.begin(), o.predicted.end());
      if (!o.converged) ++result.unconverged_folds;
    }
  }

  for (std::size_t i = 0; i < truth.size(); ++i) result.counts.add(truth[i] != 0, result.predicted[i] != 0);
  result.f1 = f1(result.counts).f1;
  return result;
}

}  // namespace

MethodResult loo_evaluate(const EmbeddingMatrix& matrix, const PropertyDataset& dataset, Method method,
                          const EvalConfig& config, std::uint64_t seed) {
  return fixed_split_evaluate(matrix, dataset, SplitSpec::leave_one_out(), method, config, seed);
}

MethodResult fixed_split_evaluate(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                                  const SplitSpec& spec, Method method, const EvalConfig& config,
                                  std::uint64_t seed) {
  const auto resolved = resolve(matrix, dataset, config.oov);
  SplitSpec effective = spec;
  if (spec.mode == SplitSpec::Mode::kFixed) {
    // Split words that were dropped as OOV leave the split too.
    std::erase_if(effective.train, [&](const std::string& w) { return !resolved.dataset.contains(w) && dataset.contains(w); });
    std::erase_if(effective.test, [&](const std::string& w) { return !resolved.dataset.contains(w) && dataset.contains(w); });
  }
  const auto folds = build_split(resolved.dataset, effective);
  return evaluate_folds(matrix, resolved, folds, method, config, seed);
}

PropertyEvaluation evaluate_property(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                                     const SplitSpec& split, const EvalConfig& config) {
  if (config.methods.empty()) throw ConfigError("no evaluation method selected");
  const auto resolved = resolve(matrix, dataset, config.oov);
  PropertyEvaluation out;
  PropertyReport& r = out.report;
  r.property = dataset.property();
  r.pos_count = resolved.dataset.positive_count();
  r.neg_count = resolved.dataset.negative_count();
  r.oov = resolved.oov;
  const auto positives = resolved.dataset.positives();
  if (positives.size() >= 2) r.avg_cos = average_pairwise_cosine(matrix, positives);

  for (Method m : config.methods) {
    if (m == Method::kNet) {
      if (config.seeds.empty()) throw ConfigError("net method needs at least one seed");
      for (std::uint64_t s : config.seeds) {
        out.details.push_back(fixed_split_evaluate(matrix, dataset, split, m, config, s));
        r.f1_net.push_back(out.details.back().f1);
      }
      continue;
    }
    out.details.push_back(fixed_split_evaluate(matrix, dataset, split, m, config, 0));
    if (m == Method::kNeigh) {
      r.f1_neigh = out.details.back().f1;
      r.best_n = out.details.back().best_n;
    } else {
      r.f1_lr = out.details.back().f1;
    }
  }
  return out;
}

NullInterval permutation_interval(std::span<const std::uint8_t> truth, std::size_t permutations,
                                  std::uint64_t seed,
                                  const std::function<double(std::span<const std::uint8_t>)>& score,
                                  double coverage) {
  if (permutations == 0) throw ConfigError("permutation count must be positive");
  if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("coverage must lie in (0, 1)");
  NullInterval out{score(truth), 0.0, 0.0};
  std::vector<std::uint8_t> shuffled(truth.begin(), truth.end());
  std::vector<double> samples(permutations);
  std::mt19937_64 rng(seed);
  for (auto& s : samples) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    s = score(shuffled);
  }
  std::sort(samples.begin(), samples.end());
  // Linear interpolation between order statistics.
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
  };
  const double tail = (1.0 - coverage) / 2.0;
  out.lower = quantile(tail);
  out.upper = quantile(1.0 - tail);
  return out;
}

}  // namespace semprobe
