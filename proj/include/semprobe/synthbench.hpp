#pragma once

// Synthetic embedding spaces with a planted (or withheld) property, for
// checking what each probe can and cannot detect.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semprobe/dataset.hpp"
#include "semprobe/embedding.hpp"

namespace semprobe {

enum class ScenarioKind {
  kClusterAligned,  // positives are one cluster
  kCrossCutting,    // positives spread over every cluster, marked only on a few dimensions
  kAbsent,          // labels ignore the geometry
};

std::string_view scenario_kind_name(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view name);

// Every word is a cluster centre plus isotropic Gaussian noise of scale
// cluster_spread. Centres are Gaussian with scale center_scale and zero on
// the signal dimensions. Positives get +-signal_strength on each signal
// dimension. Filler words are unlabelled background that fills the
// neighbour pool.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kClusterAligned;
  std::size_t dim = 50;
  std::size_t n_pos = 200;
  std::size_t n_neg = 200;
  std::size_t cluster_count = 8;
  double cluster_spread = 1.0;
  std::size_t signal_dims = 5;
  double signal_strength = 2.0;
  std::uint64_t seed = 1;
  std::size_t n_filler = 1600;
  double center_scale = 5.0;

  // Property label used for the generated dataset.
  std::string property_name() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// Throws SpecError on an invalid spec.
void validate(const ScenarioSpec& spec);

struct Scenario {
  ScenarioSpec spec;
  EmbeddingMatrix matrix;
  PropertyDataset dataset;
  std::vector<std::size_t> signal_dimensions;  // sorted
};

Scenario generate_scenario(const ScenarioSpec& spec);

// The 5 spreads x 3 kinds verification family, ordered by kind then spread.
std::vector<double> battery_spreads();
std::vector<ScenarioSpec> standard_battery(std::uint64_t seed = 1);

// "key<TAB>value" lines; unknown keys are errors, missing keys keep defaults.
ScenarioSpec read_scenario_spec(std::istream& in);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
void write_scenario_spec(const ScenarioSpec& spec, std::ostream& out);

// Writes <stem>.txt (word2vec text), <stem>.tsv (dataset) and <stem>.spec
// into `dir`, returning the three paths.
struct ExportedScenario {
  std::filesystem::path embeddings;
  std::filesystem::path dataset;
  std::filesystem::path spec;
};
ExportedScenario export_scenario(const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace semprobe
