#include <algorithm>

#include "parallel.hpp"
#include "semprobe/errors.hpp"
#include "semprobe/kernels.hpp"
#include "semprobe/probes.hpp"

namespace semprobe {

CentroidModel fit_centroid(const EmbeddingMatrix& matrix, std::span<const std::string> train_positives,
                           std::size_t n, CandidatePool pool) {
  if (train_positives.empty()) throw EmptySetError("centroid model needs at least one positive");
  if (n == 0 || n > pool.size(matrix)) {
    throw ConfigError("neighbourhood size " + std::to_string(n) + " outside [1, " +
                      std::to_string(pool.size(matrix)) + "]");
  }
  return CentroidModel{centroid(matrix, train_positives), n, std::move(pool)};
}

namespace {

// Same arithmetic as pool_similarities, so a row scores identically whether
// or not it is in the pool.
double row_similarity(const EmbeddingMatrix& matrix, std::size_t row, const WordVector& query, double qn) {
  const double rn = matrix.norm(row);
  if (rn == 0.0) return 0.0;
  return kernels::active().dot_f32_f64(matrix.row(row).data(), query.values().data(), matrix.dim()) /
         (rn * qn);
}

}  // namespace

std::size_t rank_in_pool(std::span<const double> pool_sims, const CandidatePool& pool, std::size_t row,
                         double row_similarity) {
  std::size_t ahead = 0;
  for (std::size_t i = 0; i < pool_sims.size(); ++i) {
    const std::size_t r = pool.at(i);
    if (r == row) continue;
    if (pool_sims[i] > row_similarity || (pool_sims[i] == row_similarity && r < row)) ++ahead;
  }
  return ahead + 1;
}

bool predict_centroid(const CentroidModel& model, const EmbeddingMatrix& matrix, std::string_view word) {
  const auto row = matrix.find(word);
  if (!row) throw MissingWordError(std::string(word));
  const auto sims = pool_similarities(matrix, model.centroid, model.pool);
  const double sim = row_similarity(matrix, *row, model.centroid, model.centroid.norm());
  return rank_in_pool(sims, model.pool, *row, sim) <= model.n;
}

std::vector<std::size_t> default_n_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t n = 100; n <= 1000; n += 100) grid.push_back(n);
  return grid;
}

SweepResult sweep_ranks(std::span<const std::size_t> ranks, std::span<const std::uint8_t> truth,
                        std::span<const std::size_t> n_values) {
  if (n_values.empty()) throw ConfigError("n grid is empty");
  if (ranks.size() != truth.size()) throw DimensionError("ranks and labels differ in length");
  SweepResult result;
  bool first = true;
  for (std::size_t n : n_values) {
    if (n == 0) throw ConfigError("n grid values must be at least 1");
    ConfusionCounts counts;
    for (std::size_t i = 0; i < ranks.size(); ++i) counts.add(truth[i] != 0, ranks[i] <= n);
    const double score = f1(counts).f1;
    result.per_n.push_back({n, counts, score});
    if (first || score > result.best_f1 || (score == result.best_f1 && n < result.best_n)) {
      result.best_f1 = score;
      result.best_n = n;
      first = false;
    }
  }
  return result;
}

std::vector<std::size_t> centroid_fold_ranks(const EmbeddingMatrix& matrix, std::span<const Fold> folds,
                                             const std::map<std::string, std::size_t>& rows,
                                             const CandidatePool& pool, std::size_t jobs) {
  // Group folds by their training positives; every LOO fold holding out a
  // negative trains on the same set.
  std::map<std::vector<std::string>, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> group_folds;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto [it, inserted] = group_of.emplace(folds[f].train_positives, group_folds.size());
    if (inserted) group_folds.emplace_back();
    group_folds[it->second].push_back(f);
  }
  std::vector<std::size_t> offset(folds.size() + 1, 0);
  for (std::size_t f = 0; f < folds.size(); ++f) offset[f + 1] = offset[f] + folds[f].test.size();

  std::vector<std::size_t> ranks(offset.back());
  detail::parallel_for(group_folds.size(), jobs, [&](std::size_t g) {
    const Fold& first = folds[group_folds[g].front()];
    std::vector<std::size_t> positive_rows;
    positive_rows.reserve(first.train_positives.size());
    for (const auto& w : first.train_positives) positive_rows.push_back(rows.at(w));
    const auto c = centroid_of_rows(matrix, positive_rows);
    const auto sims = pool_similarities(matrix, c, pool);
    const double qn = c.norm();
    for (std::size_t f : group_folds[g]) {
      for (std::size_t t = 0; t < folds[f].test.size(); ++t) {
        const std::size_t row = rows.at(folds[f].test[t].word);
        ranks[offset[f] + t] = rank_in_pool(sims, pool, row, row_similarity(matrix, row, c, qn));
      }
    }
  });
  return ranks;
}

SweepResult sweep_n(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                    const CandidatePool& pool, std::span<const std::size_t> n_values, OovPolicy policy,
                    std::size_t jobs) {
  const auto resolved = resolve(matrix, dataset, policy);
  const auto folds = build_split(resolved.dataset, SplitSpec::leave_one_out());
  const auto ranks = centroid_fold_ranks(matrix, folds, resolved.rows, pool, jobs);
  std::vector<std::uint8_t> truth;
  truth.reserve(ranks.size());
  for (const auto& fold : folds) {
    for (const auto& item : fold.test) truth.push_back(item.positive ? 1 : 0);
  }
  auto result = sweep_ranks(ranks, truth, n_values);
  result.oov = resolved.oov;
  return result;
}

}  // namespace semprobe
