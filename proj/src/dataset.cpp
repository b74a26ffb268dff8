#include "semprobe/dataset.hpp"

#include <algorithm>
#include <map>

#include "semprobe/errors.hpp"

namespace semprobe {

void PropertyNormTable::add(const std::string& concept_word, const std::string& property) {
  if (entries_[concept_word].insert(property).second) ++counts_[property];
}

std::size_t PropertyNormTable::count(const std::string& property) const {
  const auto it = counts_.find(property);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string> PropertyNormTable::concepts_with(const std::string& property) const {
  std::vector<std::string> out;
  for (const auto& [c, props] : entries_) {
    if (props.count(property) != 0) out.push_back(c);
  }
  return out;
}

ImplicationRule::ImplicationRule(std::string source_label, Kind rule_kind, std::string target_label)
    : source(std::move(source_label)), kind(rule_kind), target(std::move(target_label)) {
  if (source.empty() || target.empty()) throw ConfigError("rule with an empty property label");
  if (source == target) throw ConfigError("rule relates '" + source + "' to itself");
}

std::vector<ImplicationRule> default_rules() {
  return {
      ImplicationRule("is_a_bird", ImplicationRule::Kind::kImplies, "is_an_animal"),
      ImplicationRule("is_food", ImplicationRule::Kind::kExcludes, "has_wheels"),
  };
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kNorm:
      return "norm";
    case Provenance::kImplied:
      return "implied";
    case Provenance::kCrowd:
      return "crowd";
    case Provenance::kSeedExpansion:
      return "seed-expansion";
  }
  return "norm";
}

std::string_view answer_name(CrowdAnswer a) {
  switch (a) {
    case CrowdAnswer::kYes:
      return "yes";
    case CrowdAnswer::kMostly:
      return "mostly";
    case CrowdAnswer::kPossibly:
      return "possibly";
    case CrowdAnswer::kNo:
      return "no";
  }
  return "no";
}

void PropertyDataset::set(const std::string& word, bool positive, Provenance provenance) {
  items_[word] = Item{positive, provenance};
}

std::vector<std::string> PropertyDataset::positives() const {
  std::vector<std::string> out;
  for (const auto& [w, item] : items_) {
    if (item.positive) out.push_back(w);
  }
  return out;
}

std::vector<std::string> PropertyDataset::negatives() const {
  std::vector<std::string> out;
  for (const auto& [w, item] : items_) {
    if (!item.positive) out.push_back(w);
  }
  return out;
}

std::size_t PropertyDataset::positive_count() const {
  return static_cast<std::size_t>(std::count_if(
      items_.begin(), items_.end(), [](const auto& kv) { return kv.second.positive; }));
}

SplitSpec SplitSpec::fixed(std::set<std::string> train, std::set<std::string> test) {
  for (const auto& w : test) {
    if (train.count(w) != 0) throw ConfigError("word '" + w + "' is in both train and test split");
  }
  SplitSpec spec;
  spec.mode = Mode::kFixed;
  spec.train = std::move(train);
  spec.test = std::move(test);
  return spec;
}

std::vector<std::string> select_properties(const PropertyNormTable& table, std::size_t min_concepts) {
  if (min_concepts == 0) throw ConfigError("min_concepts must be at least 1");
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [prop, count] : table.property_counts()) {
    if (count >= min_concepts) kept.emplace_back(prop, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(kept.size());
  for (auto& [prop, count] : kept) out.push_back(std::move(prop));
  return out;
}

PropertyDataset naive_dataset(const PropertyNormTable& table, const std::string& property) {
  if (!table.has_property(property)) throw UnknownPropertyError(property);
  PropertyDataset ds(property);
  for (const auto& [c, props] : table.entries()) {
    ds.set(c, props.count(property) != 0, Provenance::kNorm);
  }
  return ds;
}

PropertyDataset apply_implications(const PropertyNormTable& table,
                                   const std::vector<ImplicationRule>& rules,
                                   const std::string& property) {
  std::set<std::string> implying;
  std::set<std::string> excluding;
  for (const auto& rule : rules) {
    if (rule.target != property) continue;
    (rule.kind == ImplicationRule::Kind::kImplies ? implying : excluding).insert(rule.source);
  }
  if (!table.has_property(property) && implying.empty() && excluding.empty()) {
    throw UnknownPropertyError(property);
  }

  PropertyDataset ds(property);
  std::vector<std::string> conflicts;
  for (const auto& [c, props] : table.entries()) {
    const bool listed = props.count(property) != 0;
    const bool implied = std::any_of(implying.begin(), implying.end(),
                                     [&](const std::string& s) { return props.count(s) != 0; });
    const bool excluded = std::any_of(excluding.begin(), excluding.end(),
                                      [&](const std::string& s) { return props.count(s) != 0; });
    if ((listed || implied) && excluded) {
      conflicts.push_back(c);
    } else if (listed) {
      ds.set(c, true, Provenance::kNorm);
    } else if (implied) {
      ds.set(c, true, Provenance::kImplied);
    } else if (excluded) {
      ds.set(c, false, Provenance::kImplied);
    }
  }
  if (!conflicts.empty()) {
    std::string msg = "rules give conflicting labels for '" + property + "' on:";
    for (const auto& c : conflicts) msg += " " + c;
    throw ConflictError(msg);
  }
  return ds;
}

PropertyDataset merge_crowd(const PropertyDataset& dataset,
                            const std::vector<CrowdJudgment>& judgments) {
  std::map<std::string, std::set<CrowdAnswer>> by_word;
  for (const auto& j : judgments) {
    if (j.property != dataset.property()) continue;
    // yes and mostly are the same verdict.
    by_word[j.word].insert(j.answer == CrowdAnswer::kMostly ? CrowdAnswer::kYes : j.answer);
  }
  PropertyDataset out = dataset;
  for (const auto& [word, answers] : by_word) {
    if (answers.size() > 1) {
      std::string msg = "word '" + word + "' has conflicting judgments for '" + dataset.property() + "':";
      for (auto a : answers) msg += " " + std::string(answer_name(a));
      throw InconsistentJudgmentError(msg);
    }
    switch (*answers.begin()) {
      case CrowdAnswer::kYes:
      case CrowdAnswer::kMostly:
        out.set(word, true, Provenance::kCrowd);
        break;
      case CrowdAnswer::kNo:
        out.set(word, false, Provenance::kCrowd);
        break;
      case CrowdAnswer::kPossibly:
        out.erase(word);
        break;
    }
  }
  return out;
}

namespace {

struct Scored {
  std::size_t row;
  double similarity;
};

bool ranks_before(const Scored& a, const Scored& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.row < b.row;
}

// Top-n rows by cosine to `query`, skipping `self` when given.
std::vector<Scored> top_neighbours(const EmbeddingMatrix& matrix, const WordVector& query,
                                   std::size_t n, std::optional<std::size_t> self) {
  const auto pool = CandidatePool::full_vocabulary();
  const auto sims = pool_similarities(matrix, query, pool);
  std::vector<Scored> scored;
  scored.reserve(sims.size());
  for (std::size_t r = 0; r < sims.size(); ++r) {
    if (self && *self == r) continue;
    scored.push_back({r, sims[r]});
  }
  const std::size_t k = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    ranks_before);
  scored.resize(k);
  return scored;
}

}  // namespace

std::vector<Candidate> expand_candidates(const EmbeddingMatrix& matrix,
                                         const PropertyDataset& dataset,
                                         const std::vector<std::string>& seeds, std::size_t n,
                                         OovPolicy policy) {
  if (n == 0) throw ConfigError("expansion size n must be at least 1");

  std::set<std::size_t> labelled;
  std::vector<std::size_t> positive_rows;
  for (const auto& [word, item] : dataset.items()) {
    const auto row = matrix.find(word);
    if (!row) {
      if (policy == OovPolicy::kStrict && item.positive) throw MissingWordError(word);
      continue;
    }
    labelled.insert(*row);
    if (item.positive) positive_rows.push_back(*row);
  }

  std::map<std::size_t, double> best;
  auto collect = [&](const std::vector<Scored>& hits) {
    for (const auto& h : hits) {
      if (labelled.count(h.row) != 0) continue;
      auto [it, inserted] = best.emplace(h.row, h.similarity);
      if (!inserted) it->second = std::max(it->second, h.similarity);
    }
  };

  collect(top_neighbours(matrix, centroid_of_rows(matrix, positive_rows), n, std::nullopt));
  for (const auto& seed : seeds) {
    const auto row = matrix.find(seed);
    if (!row) throw MissingWordError(seed);
    collect(top_neighbours(matrix, matrix.vector(*row), n, *row));
  }

  std::vector<Scored> merged;
  merged.reserve(best.size());
  for (const auto& [row, sim] : best) merged.push_back({row, sim});
  std::sort(merged.begin(), merged.end(), ranks_before);

  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (const auto& m : merged) out.push_back({matrix.token(m.row), m.similarity});
  return out;
}

ResolvedDataset resolve(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                        OovPolicy policy) {
  ResolvedDataset out{PropertyDataset(dataset.property()), {}, {}};
  for (const auto& [word, item] : dataset.items()) {
    const auto row = matrix.find(word);
    if (!row) {
      if (policy == OovPolicy::kStrict) throw MissingWordError(word);
      out.oov.push_back(word);
      continue;
    }
    out.dataset.set(word, item.positive, item.provenance);
    out.rows.emplace(word, *row);
  }
  return out;
}

std::vector<Fold> build_split(const PropertyDataset& dataset, const SplitSpec& spec) {
  std::vector<Fold> folds;
  if (spec.mode == SplitSpec::Mode::kLeaveOneOut) {
    const auto& items = dataset.items();
    folds.reserve(items.size());
    for (auto held = items.begin(); held != items.end(); ++held) {
      Fold fold;
      for (auto it = items.begin(); it != items.end(); ++it) {
        if (it == held) continue;
        (it->second.positive ? fold.train_positives : fold.train_negatives).push_back(it->first);
      }
      fold.test.push_back({held->first, held->second.positive});
      if (fold.train_positives.empty()) {
        throw DegenerateFoldError("holding out '" + held->first + "' leaves no training positives for '" +
                                  dataset.property() + "'");
      }
      folds.push_back(std::move(fold));
    }
    return folds;
  }

  auto label_of = [&](const std::string& w) {
    const auto it = dataset.items().find(w);
    if (it == dataset.items().end()) {
      throw ConfigError("split word '" + w + "' is not labelled in dataset '" + dataset.property() + "'");
    }
    return it->second.positive;
  };
  Fold fold;
  for (const auto& w : spec.train) {
    if (spec.test.count(w) != 0) throw ConfigError("word '" + w + "' is in both train and test split");
    (label_of(w) ? fold.train_positives : fold.train_negatives).push_back(w);
  }
  for (const auto& w : spec.test) fold.test.push_back({w, label_of(w)});
  if (fold.train_positives.empty()) {
    throw DegenerateFoldError("fixed split for '" + dataset.property() + "' has no training positives");
  }
  folds.push_back(std::move(fold));
  return folds;
}

}  // namespace semprobe
