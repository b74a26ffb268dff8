#pragma once

// Leave-one-out and fixed-split evaluation, diversity and rank correlation,
// hypothesis verdicts and report tables.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semprobe/dataset.hpp"
#include "semprobe/embedding.hpp"
#include "semprobe/metrics.hpp"
#include "semprobe/probes.hpp"

namespace semprobe {

enum class Method { kNeigh, kLr, kNet };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

// Mean cosine over all unordered pairs of the resolvable words. Words the
// matrix cannot resolve are ignored.
double average_pairwise_cosine(const EmbeddingMatrix& matrix, std::span<const std::string> words);

// Pearson correlation of mid-ranks. NaN when either side is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct EvalConfig {
  std::vector<Method> methods{Method::kNeigh, Method::kLr, Method::kNet};
  std::vector<std::uint64_t> seeds{1, 2};  // one network per seed
  LogisticConfig logistic;
  MlpConfig mlp;
  std::vector<std::size_t> n_grid = default_n_grid();
  CandidatePool pool = CandidatePool::full_vocabulary();
  OovPolicy oov = OovPolicy::kSkip;
  std::size_t jobs = 1;
};

// Outcome of one method on one property. `items`, `predicted` and (for
// neigh) `ranks` are aligned, in fold order.
struct MethodResult {
  Method method = Method::kLr;
  std::uint64_t seed = 0;
  ConfusionCounts counts;
  double f1 = 0.0;
  std::size_t best_n = 0;
  std::vector<SweepPoint> curve;
  std::vector<LabeledWord> items;
  std::vector<std::uint8_t> predicted;
  std::vector<std::size_t> ranks;
  std::size_t unconverged_folds = 0;
  std::vector<std::string> oov;
};

// `seed` only matters for kNet.
MethodResult loo_evaluate(const EmbeddingMatrix& matrix, const PropertyDataset& dataset, Method method,
                          const EvalConfig& config, std::uint64_t seed = 0);
MethodResult fixed_split_evaluate(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                                  const SplitSpec& spec, Method method, const EvalConfig& config,
                                  std::uint64_t seed = 0);

struct PropertyReport {
  std::string property;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  double avg_cos = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> f1_neigh;
  std::optional<std::size_t> best_n;
  std::optional<double> f1_lr;
  std::vector<double> f1_net;  // one per seed
  std::vector<std::string> oov;

  friend bool operator==(const PropertyReport&, const PropertyReport&) = default;
};

struct PropertyEvaluation {
  PropertyReport report;
  std::vector<MethodResult> details;
};

// Runs every configured method (every seed for kNet) under `split`. Counts
// and av-cos cover the words that resolved.
PropertyEvaluation evaluate_property(const EmbeddingMatrix& matrix, const PropertyDataset& dataset,
                                     const SplitSpec& split, const EvalConfig& config);

// --- hypotheses --------------------------------------------------------------

enum class Expectation { kNo, kPossibly, kYes };
enum class Verdict { kConfirmed, kBorderline, kContradicted };

std::string_view expectation_name(Expectation e);
std::optional<Expectation> parse_expectation(std::string_view name);
std::string_view verdict_name(Verdict v);

struct HypothesisEntry {
  std::string property;
  Expectation expected;
};

struct Thresholds {
  double learnable = 0.75;
  double possibly = 0.5;
};

struct HypothesisResult {
  std::string property;
  Expectation expected;
  Expectation observed;
  double best_f1;
  Verdict verdict;
};

// Observed status from the best classifier f1 (lr and every net). Same level
// as expected confirms, one level off is borderline, yes against no
// contradicts.
std::vector<HypothesisResult> compare_hypotheses(std::span<const PropertyReport> reports,
                                                 std::span<const HypothesisEntry> hypotheses,
                                                 const Thresholds& thresholds = {});

std::vector<HypothesisEntry> read_hypotheses(std::istream& in);
std::vector<HypothesisEntry> load_hypotheses(const std::filesystem::path& path);
void write_verdicts(std::span<const HypothesisResult> results, std::ostream& out);

// --- report tables -----------------------------------------------------------

enum class ReportFormat { kTsv, kMarkdown };

std::optional<ReportFormat> parse_report_format(std::string_view name);

struct ReportTable {
  std::vector<PropertyReport> rows;
  // Spearman of each f1 column against av-cos, keyed by column name.
  std::map<std::string, double> spearman;
  // Free-form "# key<TAB>value" lines, e.g. the candidate pool.
  std::map<std::string, std::string> meta;
};

// Spearman of every f1 column (f1-neigh, f1-lr, f1-net1, ...) against av-cos
// over the rows that have a value. Empty with fewer than two rows.
std::map<std::string, double> spearman_summary(std::span<const PropertyReport> reports);

void emit_report(const ReportTable& table, ReportFormat format, std::ostream& out);
void save_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& path);
// Inverse of the TSV form at its two-decimal precision.
ReportTable parse_report(std::istream& in);

// --- permutation null --------------------------------------------------------

struct NullInterval {
  double observed;
  double lower;
  double upper;
  bool contains_observed() const { return observed >= lower && observed <= upper; }
};

// Central `coverage` interval of score(permuted truth) over `permutations`
// shuffles of `truth`, next to score(truth).
NullInterval permutation_interval(std::span<const std::uint8_t> truth, std::size_t permutations,
                                  std::uint64_t seed,
                                  const std::function<double(std::span<const std::uint8_t>)>& score,
                                  double coverage = 0.95);

}  // namespace semprobe
