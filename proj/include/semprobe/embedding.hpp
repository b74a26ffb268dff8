#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semprobe {

// A single dense vector in double precision. Rows stored as float32 widen
// exactly, so a looked-up WordVector converts back to the stored bits.
class WordVector {
 public:
  WordVector() = default;
  explicit WordVector(std::vector<double> values);
  WordVector(std::initializer_list<double> values) : WordVector(std::vector<double>(values)) {}

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const;

  friend bool operator==(const WordVector&, const WordVector&) = default;

 private:
  std::vector<double> values_;
};

enum class EmbeddingFormat { kWord2vecBinary, kWord2vecText };

std::optional<EmbeddingFormat> parse_embedding_format(std::string_view name);
std::string_view format_name(EmbeddingFormat format);

// Immutable vocabulary -> vector table. Rows are float32; norms are cached in
// double. Safe to share between threads once constructed.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::vector<std::string> vocab, std::size_t dim, std::vector<float> data);

  std::size_t size() const { return vocab_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(std::size_t index) const { return vocab_[index]; }
  std::span<const float> row(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  double norm(std::size_t index) const { return norms_[index]; }
  std::span<const double> norms() const { return norms_; }

  // Exact token match, no normalisation.
  std::optional<std::size_t> index_of(std::string_view token) const;

  // Token lookup with normalisation: internal spaces become underscores, then
  // exact case is tried before a lowercase fallback.
  std::optional<std::size_t> find(std::string_view word) const;

  WordVector vector(std::size_t index) const;

 private:
  std::vector<std::string> vocab_;
  std::size_t dim_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string normalize_token(std::string_view word);

struct LoadOptions {
  // Keep only the first `max_vocab` entries (0 keeps everything). word2vec
  // files are frequency ordered, so this keeps the most frequent words.
  std::size_t max_vocab = 0;
};

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                const LoadOptions& options = {});
EmbeddingMatrix read_word2vec_binary(std::istream& in, const LoadOptions& options = {});
EmbeddingMatrix read_word2vec_text(std::istream& in, const LoadOptions& options = {});

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                     EmbeddingFormat format);
void write_word2vec_binary(const EmbeddingMatrix& matrix, std::ostream& out);
void write_word2vec_text(const EmbeddingMatrix& matrix, std::ostream& out);

// Geometry.

std::optional<WordVector> lookup(const EmbeddingMatrix& matrix, std::string_view word);

double cosine(const WordVector& a, const WordVector& b);

// Mean of the raw rows. Throws EmptySetError / MissingWordError.
WordVector centroid(const EmbeddingMatrix& matrix, std::span<const std::string> words);
WordVector centroid_of_rows(const EmbeddingMatrix& matrix, std::span<const std::size_t> rows);

// Candidate set for nearest-neighbour ranking: the whole vocabulary, or an
// explicit subset of row indices.
class CandidatePool {
 public:
  static CandidatePool full_vocabulary() { return CandidatePool{}; }
  static CandidatePool from_rows(std::vector<std::size_t> rows);
  static CandidatePool from_tokens(const EmbeddingMatrix& matrix, std::span<const std::string> tokens);

  bool is_full() const { return !rows_.has_value(); }
  std::size_t size(const EmbeddingMatrix& matrix) const {
    return rows_ ? rows_->size() : matrix.size();
  }
  // Row index of the i-th pool member.
  std::size_t at(std::size_t i) const { return rows_ ? (*rows_)[i] : i; }
  bool contains(std::size_t row) const;
  // Explicit members; empty for the full vocabulary.
  std::span<const std::size_t> rows() const {
    return rows_ ? std::span<const std::size_t>(*rows_) : std::span<const std::size_t>();
  }
  std::string describe(const EmbeddingMatrix& matrix) const;

 private:
  CandidatePool() = default;
  std::optional<std::vector<std::size_t>> rows_;  // sorted, unique
};

struct RankedToken {
  std::size_t index;
  std::string token;
  double similarity;
};

// Cosine similarity of every pool member to `query`, in pool order.
std::vector<double> pool_similarities(const EmbeddingMatrix& matrix, const WordVector& query,
                                      const CandidatePool& pool);

// Pool members sorted by descending similarity, ties by ascending row index.
std::vector<RankedToken> rank_by_cosine(const EmbeddingMatrix& matrix, const WordVector& query,
                                        const CandidatePool& pool);

}  // namespace semprobe
