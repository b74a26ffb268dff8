#include "semprobe/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "semprobe/errors.hpp"
#include "semprobe/kernels.hpp"

namespace semprobe {

WordVector::WordVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw DegenerateVectorError("word vector contains a non-finite entry");
  }
}

double WordVector::norm() const { return std::sqrt(kernels::dot(values(), values())); }

std::optional<EmbeddingFormat> parse_embedding_format(std::string_view name) {
  if (name == "word2vec-binary" || name == "binary" || name == "bin") {
    return EmbeddingFormat::kWord2vecBinary;
  }
  if (name == "word2vec-text" || name == "text" || name == "txt") {
    return EmbeddingFormat::kWord2vecText;
  }
  return std::nullopt;
}

std::string_view format_name(EmbeddingFormat format) {
  return format == EmbeddingFormat::kWord2vecBinary ? "word2vec-binary" : "word2vec-text";
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim,
                                 std::vector<float> data)
    : vocab_(std::move(vocab)), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw DimensionError("embedding dimension must be positive");
  if (data_.size() != vocab_.size() * dim_) {
    throw DimensionError("embedding payload has " + std::to_string(data_.size()) +
                         " values, expected " + std::to_string(vocab_.size() * dim_));
  }
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (vocab_[i].empty()) throw FormatError("empty token at entry " + std::to_string(i));
    if (!index_.emplace(vocab_[i], i).second) throw DuplicateTokenError(vocab_[i]);
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw FormatError("embedding payload contains a non-finite value");
  }
  norms_.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    norms_[i] = std::sqrt(kernels::dot(row(i), row(i)));
  }
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view word) const {
  const std::string token = normalize_token(word);
  if (token.empty()) return std::nullopt;
  if (auto hit = index_of(token)) return hit;
  std::string lower = token;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower != token) return index_of(lower);
  return std::nullopt;
}

WordVector EmbeddingMatrix::vector(std::size_t index) const {
  const auto r = row(index);
  return WordVector(std::vector<double>(r.begin(), r.end()));
}

std::string normalize_token(std::string_view word) {
  const auto first = word.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  const auto last = word.find_last_not_of(' ');
  std::string token(word.substr(first, last - first + 1));
  std::replace(token.begin(), token.end(), ' ', '_');
  return token;
}

std::optional<WordVector> lookup(const EmbeddingMatrix& matrix, std::string_view word) {
  if (auto index = matrix.find(word)) return matrix.vector(*index);
  return std::nullopt;
}

double cosine(const WordVector& a, const WordVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("cosine of vectors with dims " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
  const double c = kernels::dot(a.values(), b.values()) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

WordVector centroid_of_rows(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows) {
  if (rows.empty()) throw EmptySetError("centroid of an empty word list");
  std::vector<double> sum(matrix.dim(), 0.0);
  for (std::size_t r : rows) kernels::axpy(1.0, matrix.row(r), sum);
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (double& v : sum) v *= scale;
  return WordVector(std::move(sum));
}

WordVector centroid(const EmbeddingMatrix& matrix, std::span<const std::string> words) {
  if (words.empty()) throw EmptySetError("centroid of an empty word list");
  std::vector<std::size_t> rows;
  rows.reserve(words.size());
  for (const auto& w : words) {
    const auto index = matrix.find(w);
    if (!index) throw MissingWordError(w);
    rows.push_back(*index);
  }
  return centroid_of_rows(matrix, rows);
}

CandidatePool CandidatePool::from_rows(std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  CandidatePool pool;
  pool.rows_ = std::move(rows);
  return pool;
}

CandidatePool CandidatePool::from_tokens(const EmbeddingMatrix& matrix,
                                         std::span<const std::string> tokens) {
  std::vector<std::size_t> rows;
  rows.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto index = matrix.find(t);
    if (!index) throw MissingWordError(t);
    rows.push_back(*index);
  }
  return from_rows(std::move(rows));
}

bool CandidatePool::contains(std::size_t row) const {
  if (!rows_) return true;
  return std::binary_search(rows_->begin(), rows_->end(), row);
}

std::string CandidatePool::describe(const EmbeddingMatrix& matrix) const {
  if (rows_) return "subset (" + std::to_string(rows_->size()) + " tokens)";
  return "full-vocab (" + std::to_string(matrix.size()) + " tokens)";
}

std::vector<double> pool_similarities(const EmbeddingMatrix& matrix, const WordVector& query,
                                      const CandidatePool& pool) {
  if (query.dim() != matrix.dim()) {
    throw DimensionError("query has dim " + std::to_string(query.dim()) + ", matrix has " +
                         std::to_string(matrix.dim()));
  }
  const double qn = query.norm();
  if (qn == 0.0) throw DegenerateVectorError("ranking query has zero norm");
  const auto& k = kernels::active();
  const std::size_t n = pool.size(matrix);
  std::vector<double> sims(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = pool.at(i);
    const double rn = matrix.norm(r);
    // A zero row has no direction; it sits at similarity 0 rather than
    // failing the whole ranking.
    sims[i] = rn == 0.0 ? 0.0
                        : k.dot_f32_f64(matrix.row(r).data(), query.values().data(), matrix.dim()) /
                              (rn * qn);
  }
  return sims;
}

std::vector<RankedToken> rank_by_cosine(const EmbeddingMatrix& matrix, const WordVector& query,
                                        const CandidatePool& pool) {
  const auto sims = pool_similarities(matrix, query, pool);
  std::vector<std::size_t> order(sims.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return pool.at(a) < pool.at(b);
  });
  std::vector<RankedToken> ranked;
  ranked.reserve(order.size());
  for (std::size_t i : order) {
    const std::size_t r = pool.at(i);
    ranked.push_back({r, matrix.token(r), std::clamp(sims[i], -1.0, 1.0)});
  }
  return ranked;
}

}  // namespace semprobe
