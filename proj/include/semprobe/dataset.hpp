#pragma once

// Positive/negative example sets per semantic property: property-norm tables,
// implication/exclusion rules, crowd judgments, candidate expansion and
// evaluation splits.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "semprobe/embedding.hpp"

namespace semprobe {

enum class OovPolicy { kSkip, kStrict };

// concept -> set of property labels ("is_dangerous", "has_wheels", ...).
class PropertyNormTable {
 public:
  void add(const std::string& concept_word, const std::string& property);

  const std::map<std::string, std::set<std::string>>& entries() const { return entries_; }
  std::size_t concept_count() const { return entries_.size(); }
  bool has_property(const std::string& property) const { return counts_.count(property) != 0; }
  // Number of concepts listing `property`.
  std::size_t count(const std::string& property) const;
  const std::map<std::string, std::size_t>& property_counts() const { return counts_; }
  std::vector<std::string> concepts_with(const std::string& property) const;

 private:
  std::map<std::string, std::set<std::string>> entries_;
  std::map<std::string, std::size_t> counts_;
};

struct ImplicationRule {
  enum class Kind { kImplies, kExcludes };

  ImplicationRule(std::string source, Kind kind, std::string target);

  std::string source;
  Kind kind;
  std::string target;
};

// is_a_bird implies is_an_animal; is_food excludes has_wheels.
std::vector<ImplicationRule> default_rules();

enum class CrowdAnswer { kYes, kMostly, kPossibly, kNo };

struct CrowdJudgment {
  std::string word;
  std::string property;
  CrowdAnswer answer;
};

enum class Provenance { kNorm, kImplied, kCrowd, kSeedExpansion };

std::string_view provenance_name(Provenance p);
std::string_view answer_name(CrowdAnswer a);

// Labelled words for one property. Positives and negatives are disjoint by
// construction: labelling a word moves it out of the other class.
class PropertyDataset {
 public:
  struct Item {
    bool positive;
    Provenance provenance;
  };

  PropertyDataset() = default;
  explicit PropertyDataset(std::string property) : property_(std::move(property)) {}

  const std::string& property() const { return property_; }
  void set_property(std::string property) { property_ = std::move(property); }

  void set(const std::string& word, bool positive, Provenance provenance);
  void erase(const std::string& word) { items_.erase(word); }
  bool contains(const std::string& word) const { return items_.count(word) != 0; }

  // Items in lexicographic word order.
  const std::map<std::string, Item>& items() const { return items_; }
  std::vector<std::string> positives() const;
  std::vector<std::string> negatives() const;
  std::size_t positive_count() const;
  std::size_t negative_count() const { return items_.size() - positive_count(); }
  std::size_t size() const { return items_.size(); }

  friend bool operator==(const PropertyDataset& a, const PropertyDataset& b);

 private:
  std::string property_;
  std::map<std::string, Item> items_;
};

inline bool operator==(const PropertyDataset::Item& a, const PropertyDataset::Item& b) {
  return a.positive == b.positive && a.provenance == b.provenance;
}
inline bool operator==(const PropertyDataset& a, const PropertyDataset& b) {
  return a.property_ == b.property_ && a.items_ == b.items_;
}

struct SplitSpec {
  enum class Mode { kLeaveOneOut, kFixed };

  static SplitSpec leave_one_out() { return {}; }
  static SplitSpec fixed(std::set<std::string> train, std::set<std::string> test);

  Mode mode = Mode::kLeaveOneOut;
  std::set<std::string> train;
  std::set<std::string> test;
};

struct LabeledWord {
  std::string word;
  bool positive;
};

struct Fold {
  std::vector<std::string> train_positives;
  std::vector<std::string> train_negatives;
  std::vector<LabeledWord> test;
};

// --- construction ----------------------------------------------------------

PropertyNormTable ingest_norms(const std::filesystem::path& path);
PropertyNormTable read_norms(std::istream& in);

// Properties listed for at least `min_concepts` concepts, by descending count
// then label.
std::vector<std::string> select_properties(const PropertyNormTable& table,
                                           std::size_t min_concepts = 20);

// Listed concepts are positives, every other concept a negative.
PropertyDataset naive_dataset(const PropertyNormTable& table, const std::string& property);

// Positives: concepts listing the property or an implying property.
// Negatives: concepts listing an excluding property. Everything else is
// unverified and left out. Throws ConflictError when a concept lands in both.
PropertyDataset apply_implications(const PropertyNormTable& table,
                                   const std::vector<ImplicationRule>& rules,
                                   const std::string& property);

// yes/mostly -> positive, no -> negative, possibly -> removed. Only judgments
// for the dataset's property are used; they override earlier labels.
PropertyDataset merge_crowd(const PropertyDataset& dataset,
                            const std::vector<CrowdJudgment>& judgments);

struct Candidate {
  std::string token;
  double similarity;  // best similarity over the centroid and seed queries
};

// Unlabelled annotation candidates: top-n neighbours of the positive centroid
// and of each seed (a seed is not its own neighbour), minus words already in
// the dataset. Sorted by descending similarity, ties by vocabulary order.
std::vector<Candidate> expand_candidates(const EmbeddingMatrix& matrix,
                                         const PropertyDataset& dataset,
                                         const std::vector<std::string>& seeds, std::size_t n,
                                         OovPolicy policy = OovPolicy::kStrict);

std::vector<Fold> build_split(const PropertyDataset& dataset, const SplitSpec& spec);

// The dataset restricted to words the matrix can resolve, with each word's
// row. Unresolvable words are listed in `oov` under kSkip and raise
// MissingWordError under kStrict.
struct ResolvedDataset {
  PropertyDataset dataset;
  std::map<std::string, std::size_t> rows;
  std::vector<std::string> oov;
};

ResolvedDataset resolve(const EmbeddingMatrix& matrix, const PropertyDataset& dataset, OovPolicy policy);

// --- files -----------------------------------------------------------------

std::vector<ImplicationRule> read_rules(std::istream& in);
std::vector<ImplicationRule> load_rules(const std::filesystem::path& path);
std::vector<CrowdJudgment> read_crowd(std::istream& in);
std::vector<CrowdJudgment> load_crowd(const std::filesystem::path& path);

// "# property: <label>" header, then "word<TAB>1|0<TAB>provenance" rows.
void write_dataset(const PropertyDataset& dataset, std::ostream& out);
void save_dataset(const PropertyDataset& dataset, const std::filesystem::path& path);
PropertyDataset read_dataset(std::istream& in);
PropertyDataset load_dataset(const std::filesystem::path& path);

}  // namespace semprobe
