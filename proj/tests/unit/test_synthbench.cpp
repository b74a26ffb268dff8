#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <sstream>

#include "semprobe/errors.hpp"
#include "semprobe/evaluation.hpp"
#include "semprobe/synthbench.hpp"
#include "support.hpp"

using namespace semprobe;

namespace {

ScenarioSpec small(ScenarioKind kind) {
  ScenarioSpec s;
  s.kind = kind;
  s.dim = 16;
  s.n_pos = 30;
  s.n_neg = 40;
  s.cluster_count = 4;
  s.signal_dims = 3;
  s.n_filler = 100;
  return s;
}

bool same_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.vocab() != b.vocab() || a.dim() != b.dim()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (std::memcmp(a.row(r).data(), b.row(r).data(), a.dim() * sizeof(float)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("same spec and seed give identical output") {
  for (auto kind : {ScenarioKind::kClusterAligned, ScenarioKind::kCrossCutting, ScenarioKind::kAbsent}) {
    const auto a = generate_scenario(small(kind));
    const auto b = generate_scenario(small(kind));
    CHECK(same_matrix(a.matrix, b.matrix));
    CHECK(a.dataset == b.dataset);
    CHECK(a.signal_dimensions == b.signal_dimensions);
  }
  auto other = small(ScenarioKind::kCrossCutting);
  other.seed = 2;
  CHECK_FALSE(same_matrix(generate_scenario(other).matrix, generate_scenario(small(ScenarioKind::kCrossCutting)).matrix));
}

TEST_CASE("shape, counts and token names") {
  const auto sc = generate_scenario(small(ScenarioKind::kCrossCutting));
  CHECK(sc.matrix.size() == 30 + 40 + 100);
  CHECK(sc.matrix.dim() == 16);
  CHECK(sc.dataset.positive_count() == 30);
  CHECK(sc.dataset.negative_count() == 40);
  CHECK(sc.matrix.token(0) == "w0001");
  CHECK(sc.matrix.token(169) == "w0170");
  CHECK(sc.signal_dimensions.size() == 3);
  CHECK(std::is_sorted(sc.signal_dimensions.begin(), sc.signal_dimensions.end()));
  CHECK(sc.dataset.property() == "synth_cross_cutting_s1.00");
}

TEST_CASE("positives are offset on the signal dimensions") {
  auto spec = small(ScenarioKind::kCrossCutting);
  spec.cluster_spread = 0.01;
  const auto sc = generate_scenario(spec);
  for (const auto& w : sc.dataset.positives()) {
    const auto row = *sc.matrix.find(w);
    for (auto d : sc.signal_dimensions) CHECK(std::abs(std::abs(sc.matrix.row(row)[d]) - 2.0f) < 0.1f);
  }
  for (const auto& w : sc.dataset.negatives()) {
    const auto row = *sc.matrix.find(w);
    for (auto d : sc.signal_dimensions) CHECK(std::abs(sc.matrix.row(row)[d]) < 0.1f);
  }
}

TEST_CASE("positive diversity orders the kinds") {
  auto cos_of = [](ScenarioKind k) {
    const auto sc = generate_scenario(small(k));
    return average_pairwise_cosine(sc.matrix, sc.dataset.positives());
  };
  const double aligned = cos_of(ScenarioKind::kClusterAligned);
  const double cross = cos_of(ScenarioKind::kCrossCutting);
  CHECK(aligned > 0.8);
  CHECK(cross < aligned - 0.3);
}

TEST_CASE("validation") {
  auto bad = [](auto mutate) {
    auto s = small(ScenarioKind::kCrossCutting);
    mutate(s);
    return s;
  };
  CHECK_NOTHROW(validate(small(ScenarioKind::kAbsent)));
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) { s.dim = 0; })), SpecError);
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) { s.n_pos = 1; })), SpecError);
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) { s.signal_dims = 17; })), SpecError);
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) { s.cluster_spread = -1; })), SpecError);
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) { s.cluster_count = 0; })), SpecError);
  CHECK_NOTHROW(validate(bad([](ScenarioSpec& s) { s.cluster_count = 1; })));
  CHECK_THROWS_AS(validate(bad([](ScenarioSpec& s) {
                    s.kind = ScenarioKind::kClusterAligned;
                    s.cluster_count = 1;
                  })),
                  SpecError);
  CHECK_THROWS_AS(generate_scenario(bad([](ScenarioSpec& s) { s.dim = 0; })), SpecError);
}

TEST_CASE("standard battery") {
  const auto b = standard_battery(3);
  REQUIRE(b.size() == 15);
  CHECK(battery_spreads() == std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5});
  CHECK(b[0].kind == ScenarioKind::kClusterAligned);
  CHECK(b[5].kind == ScenarioKind::kCrossCutting);
  CHECK(b[14].kind == ScenarioKind::kAbsent);
  CHECK(b[6].cluster_spread == 1.0);
  CHECK(b[14].signal_strength == 0.0);
  for (const auto& s : b) CHECK(s.seed == 3);
}

TEST_CASE("kind names") {
  CHECK(scenario_kind_name(ScenarioKind::kCrossCutting) == "cross-cutting");
  CHECK(parse_scenario_kind("absent") == ScenarioKind::kAbsent);
  CHECK_FALSE(parse_scenario_kind("planted"));
}

TEST_CASE("spec file round trip and errors") {
  auto s = small(ScenarioKind::kAbsent);
  s.cluster_spread = 1.25;
  s.seed = 77;
  std::stringstream io;
  write_scenario_spec(s, io);
  CHECK(read_scenario_spec(io) == s);

  std::istringstream partial("kind\tcross-cutting\ndim\t8\n");
  const auto p = read_scenario_spec(partial);
  CHECK(p.dim == 8);
  CHECK(p.n_pos == ScenarioSpec{}.n_pos);

  std::istringstream unknown("colour\tblue\n");
  CHECK_THROWS_AS(read_scenario_spec(unknown), FormatError);
  std::istringstream bad_value("dim\tlots\n");
  CHECK_THROWS_AS(read_scenario_spec(bad_value), FormatError);
}

TEST_CASE("export reloads to the same scenario") {
  testing_support::TempDir dir;
  const auto sc = generate_scenario(small(ScenarioKind::kClusterAligned));
  const auto files = export_scenario(sc, dir.path());
  CHECK(same_matrix(load_embeddings(files.embeddings, EmbeddingFormat::kWord2vecText), sc.matrix));
  CHECK(load_dataset(files.dataset) == sc.dataset);
  CHECK(load_scenario_spec(files.spec) == sc.spec);
}
