#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "semprobe/dataset.hpp"
#include "semprobe/errors.hpp"
#include "support.hpp"

using namespace semprobe;
using testing_support::matrix_of;

namespace {

PropertyNormTable table_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return read_norms(in);
}

bool disjoint(const PropertyDataset& ds) {
  const auto p = ds.positives();
  const auto n = ds.negatives();
  std::vector<std::string> both;
  std::set_intersection(p.begin(), p.end(), n.begin(), n.end(), std::back_inserter(both));
  return both.empty();
}

// Random table over concepts c0..c(n-1) and properties p0..p(k-1).
PropertyNormTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  PropertyNormTable t;
  std::bernoulli_distribution coin(0.3);
  for (std::size_t c = 0; c < n; ++c) {
    t.add("c" + std::to_string(c), "p0");  // keeps every concept non-empty
    for (std::size_t p = 1; p < k; ++p) {
      if (coin(rng)) t.add("c" + std::to_string(c), "p" + std::to_string(p));
    }
  }
  return t;
}

}  // namespace

TEST_SUITE("norms") {
  TEST_CASE("pairs aggregate per concept") {
    const auto t = table_from("falcon\tis_a_bird\nfalcon\thas_a_beak\n");
    CHECK(t.entries().at("falcon") == std::set<std::string>{"is_a_bird", "has_a_beak"});
  }

  TEST_CASE("duplicate line ingested once") {
    const auto t = table_from("falcon\tis_a_bird\nfalcon\tis_a_bird\n");
    CHECK(t.count("is_a_bird") == 1);
  }

  TEST_CASE("malformed line names its number") {
    try {
      table_from("falcon\tis_a_bird\nbroken line\n");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.unit() == FormatError::Unit::kLine);
      CHECK(e.offset() == 2);
    }
  }

  TEST_CASE("missing file") { CHECK_THROWS_AS(ingest_norms("/nonexistent/norms.tsv"), IoError); }
}

TEST_SUITE("select_properties") {
  PropertyNormTable counted(std::initializer_list<std::pair<std::string, int>> counts) {
    PropertyNormTable t;
    for (const auto& [p, n] : counts) {
      for (int i = 0; i < n; ++i) t.add("w" + std::to_string(i), p);
    }
    return t;
  }

  TEST_CASE("threshold keeps 25, drops 19") {
    const auto t = counted({{"keep", 25}, {"drop", 19}});
    CHECK(select_properties(t, 20) == std::vector<std::string>{"keep"});
  }

  TEST_CASE("min_concepts 1 keeps everything") {
    const auto t = counted({{"x", 1}, {"y", 3}});
    CHECK(select_properties(t, 1) == std::vector<std::string>{"y", "x"});
  }

  TEST_CASE("counts {a:30, b:20, c:5} give [a, b]") {
    const auto t = counted({{"c", 5}, {"b", 20}, {"a", 30}});
    CHECK(select_properties(t) == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("equal counts order lexicographically") {
    const auto t = counted({{"zeta", 4}, {"alpha", 4}});
    CHECK(select_properties(t, 1) == std::vector<std::string>{"alpha", "zeta"});
  }

  TEST_CASE("agrees with a direct tally") {
    std::mt19937_64 rng(3);
    const auto t = random_table(rng, 60, 12);
    std::map<std::string, std::size_t> tally;
    for (const auto& [c, props] : t.entries()) {
      for (const auto& p : props) ++tally[p];
    }
    std::vector<std::pair<std::size_t, std::string>> expect;
    for (const auto& [p, n] : tally) {
      if (n >= 18) expect.push_back({n, p});
    }
    std::sort(expect.begin(), expect.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> labels;
    for (const auto& e : expect) labels.push_back(e.second);
    CHECK(select_properties(t, 18) == labels);
  }

  TEST_CASE("zero threshold is rejected") { CHECK_THROWS_AS(select_properties(PropertyNormTable{}, 0), ConfigError); }
}

TEST_SUITE("naive_dataset") {
  TEST_CASE("10 concepts, 4 listing p") {
    PropertyNormTable t;
    for (int i = 0; i < 10; ++i) t.add("c" + std::to_string(i), i < 4 ? "p" : "q");
    const auto ds = naive_dataset(t, "p");
    CHECK(ds.positive_count() == 4);
    CHECK(ds.negative_count() == 6);
    for (const auto& [w, item] : ds.items()) CHECK(item.provenance == Provenance::kNorm);
  }

  TEST_CASE("falcon without is_an_animal is a negative") {
    const auto t = table_from("falcon\tis_a_bird\ntiger\tis_an_animal\n");
    const auto ds = naive_dataset(t, "is_an_animal");
    CHECK(ds.negatives() == std::vector<std::string>{"falcon"});
  }

  TEST_CASE("unknown property") {
    const auto t = table_from("falcon\tis_a_bird\n");
    CHECK_THROWS_AS(naive_dataset(t, "has_wheels"), UnknownPropertyError);
  }
}

TEST_SUITE("apply_implications") {
  const auto table = table_from(
      "falcon\tis_a_bird\n"
      "tiger\tis_an_animal\n"
      "apple\tis_food\n"
      "bread\tis_food\n"
      "car\thas_wheels\n"
      "chair\tis_furniture\n");

  TEST_CASE("implied positive") {
    const std::vector<ImplicationRule> rules{{"is_a_bird", ImplicationRule::Kind::kImplies, "is_an_animal"}};
    const auto ds = apply_implications(table, rules, "is_an_animal");
    CHECK(ds.positives() == std::vector<std::string>{"falcon", "tiger"});
    CHECK(ds.items().at("falcon").provenance == Provenance::kImplied);
    CHECK(ds.items().at("tiger").provenance == Provenance::kNorm);
    CHECK(ds.negative_count() == 0);
  }

  TEST_CASE("excluding rule yields verified negatives and drops the rest") {
    const std::vector<ImplicationRule> rules{{"is_food", ImplicationRule::Kind::kExcludes, "has_wheels"}};
    const auto ds = apply_implications(table, rules, "has_wheels");
    CHECK(ds.positives() == std::vector<std::string>{"car"});
    CHECK(ds.negatives() == std::vector<std::string>{"apple", "bread"});
    CHECK_FALSE(ds.contains("chair"));
  }

  TEST_CASE("empty rule list") {
    const auto ds = apply_implications(table, {}, "has_wheels");
    CHECK(ds.positives() == std::vector<std::string>{"car"});
    CHECK(ds.negative_count() == 0);
  }

  TEST_CASE("conflict names the concept") {
    const auto t = table_from("pizza\tis_food\npizza\thas_wheels\n");
    const std::vector<ImplicationRule> rules{{"is_food", ImplicationRule::Kind::kExcludes, "has_wheels"}};
    try {
      apply_implications(t, rules, "has_wheels");
      FAIL("expected ConflictError");
    } catch (const ConflictError& e) {
      CHECK(std::string(e.what()).find("pizza") != std::string::npos);
    }
  }

  TEST_CASE("rule with source equal to target") {
    CHECK_THROWS_AS(ImplicationRule("a", ImplicationRule::Kind::kImplies, "a"), ConfigError);
  }

  TEST_CASE("default rules") {
    const auto rules = default_rules();
    const bool has_bird = std::any_of(rules.begin(), rules.end(), [](const ImplicationRule& r) {
      return r.source == "is_a_bird" && r.target == "is_an_animal" && r.kind == ImplicationRule::Kind::kImplies;
    });
    CHECK(has_bird);
  }

  TEST_CASE("adding an implies rule never removes a positive") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const auto t = random_table(rng, 40, 8);
      std::vector<ImplicationRule> rules;
      std::uniform_int_distribution<int> pick(2, 7);
      for (int r = 0; r < 3; ++r) {
        rules.emplace_back("p" + std::to_string(pick(rng)), ImplicationRule::Kind::kImplies, "p1");
      }
      const auto before = apply_implications(t, rules, "p1");
      rules.emplace_back("p" + std::to_string(pick(rng)), ImplicationRule::Kind::kImplies, "p1");
      const auto after = apply_implications(t, rules, "p1");
      const auto pb = before.positives();
      const auto pa = after.positives();
      CHECK(std::includes(pa.begin(), pa.end(), pb.begin(), pb.end()));
      CHECK(disjoint(after));
    }
  }
}

TEST_SUITE("merge_crowd") {
  PropertyDataset base() {
    PropertyDataset ds("is_pink");
    ds.set("flamingo", true, Provenance::kNorm);
    ds.set("bikini", true, Provenance::kImplied);
    ds.set("coal", false, Provenance::kImplied);
    return ds;
  }

  TEST_CASE("possibly removes the word") {
    const auto out = merge_crowd(base(), {{"bikini", "is_pink", CrowdAnswer::kPossibly}});
    CHECK_FALSE(out.contains("bikini"));
  }

  TEST_CASE("yes and mostly add positives") {
    PropertyDataset ds("is_dangerous");
    const auto out = merge_crowd(ds, {{"tiger", "is_dangerous", CrowdAnswer::kYes},
                                      {"knife", "is_dangerous", CrowdAnswer::kMostly}});
    CHECK(out.positives() == std::vector<std::string>{"knife", "tiger"});
    CHECK(out.items().at("tiger").provenance == Provenance::kCrowd);
  }

  TEST_CASE("crowd no overrides an implied positive") {
    const auto out = merge_crowd(base(), {{"bikini", "is_pink", CrowdAnswer::kNo}});
    CHECK(out.negatives() == std::vector<std::string>{"bikini", "coal"});
    CHECK(out.items().at("bikini").provenance == Provenance::kCrowd);
  }

  TEST_CASE("judgments for other properties are ignored") {
    CHECK(merge_crowd(base(), {{"coal", "is_black", CrowdAnswer::kYes}}) == base());
  }

  TEST_CASE("yes and no for the same word") {
    CHECK_THROWS_AS(merge_crowd(base(), {{"coal", "is_pink", CrowdAnswer::kYes},
                                         {"coal", "is_pink", CrowdAnswer::kNo}}),
                    InconsistentJudgmentError);
  }

  TEST_CASE("idempotent and disjoint") {
    const std::vector<CrowdJudgment> j{{"coal", "is_pink", CrowdAnswer::kMostly},
                                       {"bikini", "is_pink", CrowdAnswer::kPossibly},
                                       {"pig", "is_pink", CrowdAnswer::kYes},
                                       {"grass", "is_pink", CrowdAnswer::kNo}};
    const auto once = merge_crowd(base(), j);
    CHECK(merge_crowd(once, j) == once);
    CHECK(disjoint(once));
  }
}

TEST_SUITE("crowd file") {
  TEST_CASE("header row and answers") {
    std::istringstream in("word,property,answer\ntiger,is_dangerous,yes\nbikini,is_pink,possibly\n");
    const auto j = read_crowd(in);
    REQUIRE(j.size() == 2);
    CHECK(j[1].answer == CrowdAnswer::kPossibly);
  }

  TEST_CASE("unknown answer") {
    std::istringstream in("tiger,is_dangerous,maybe\n");
    CHECK_THROWS_AS(read_crowd(in), FormatError);
  }

  TEST_CASE("empty file gives no judgments") {
    std::istringstream in("");
    CHECK(read_crowd(in).empty());
  }
}

TEST_SUITE("rules file") {
  TEST_CASE("parse both kinds") {
    std::istringstream in("is_a_bird\timplies\tis_an_animal\nis_food\texcludes\thas_wheels\n");
    const auto r = read_rules(in);
    REQUIRE(r.size() == 2);
    CHECK(r[1].kind == ImplicationRule::Kind::kExcludes);
  }

  TEST_CASE("bad kind") {
    std::istringstream in("a\tentails\tb\n");
    CHECK_THROWS_AS(read_rules(in), FormatError);
  }
}

TEST_SUITE("expand_candidates") {
  // w0..w4 lie along the first axis, the rest point elsewhere.
  const auto m = matrix_of({{1, 0.05f, 0},
                            {1, -0.05f, 0.02f},
                            {1, 0.1f, -0.1f},
                            {1, 0, 0.1f},
                            {1, 0.12f, 0.05f},
                            {0, 1, 0},
                            {0, 0, 1},
                            {0.1f, 1, 1},
                            {-1, 0.2f, 0},
                            {0, -1, 0.3f}},
                           {"w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9"});

  TEST_CASE("planted cluster returns its three unlabelled members") {
    PropertyDataset ds("p");
    ds.set("w0", true, Provenance::kNorm);
    ds.set("w1", true, Provenance::kNorm);
    const auto out = expand_candidates(m, ds, {}, 5);
    std::set<std::string> got;
    for (const auto& c : out) got.insert(c.token);
    CHECK(got == std::set<std::string>{"w2", "w3", "w4"});

    // brute-force order from the ranking oracle
    const std::vector<std::string> pos{"w0", "w1"};
    const auto ranked = rank_by_cosine(m, centroid(m, pos), CandidatePool::full_vocabulary());
    std::vector<std::string> expect;
    for (const auto& r : ranked) {
      if (r.token != "w0" && r.token != "w1" && expect.size() < 3) expect.push_back(r.token);
    }
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i].token == expect[i]);
  }

  TEST_CASE("single seed whose nearest neighbour is already positive") {
    const auto mm = matrix_of({{1, 0}, {0.99f, 0.1f}, {0, 1}}, {"car", "truck", "apple"});
    PropertyDataset ds("has_wheels");
    ds.set("truck", true, Provenance::kNorm);
    ds.set("car", true, Provenance::kNorm);
    ds.set("apple", false, Provenance::kImplied);
    CHECK(expand_candidates(mm, ds, {"car"}, 1).empty());
  }

  TEST_CASE("seed results are merged without duplicates") {
    PropertyDataset ds("p");
    ds.set("w0", true, Provenance::kNorm);
    const auto out = expand_candidates(m, ds, {"w5", "w6"}, 3);
    std::set<std::string> uniq;
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(uniq.insert(out[i].token).second);
      CHECK(out[i].token != "w0");
      if (i > 0) CHECK(out[i - 1].similarity >= out[i].similarity);
    }
    CHECK(uniq.count("w7") == 1);
  }

  TEST_CASE("errors") {
    PropertyDataset ds("p");
    ds.set("w0", true, Provenance::kNorm);
    CHECK_THROWS_AS(expand_candidates(m, ds, {"zzz"}, 3), MissingWordError);
    CHECK_THROWS_AS(expand_candidates(m, ds, {}, 0), ConfigError);
  }
}

TEST_SUITE("build_split") {
  PropertyDataset five() {
    PropertyDataset ds("p");
    for (const char* w : {"a", "b", "c"}) ds.set(w, true, Provenance::kNorm);
    for (const char* w : {"x", "y"}) ds.set(w, false, Provenance::kNorm);
    return ds;
  }

  TEST_CASE("3 pos / 2 neg gives 5 folds partitioning the items") {
    const auto folds = build_split(five(), SplitSpec::leave_one_out());
    REQUIRE(folds.size() == 5);
    std::multiset<std::string> held;
    for (const auto& f : folds) {
      REQUIRE(f.test.size() == 1);
      held.insert(f.test[0].word);
      CHECK(f.train_positives.size() + f.train_negatives.size() == 4);
      // the held-out word never feeds its own fold
      CHECK(std::count(f.train_positives.begin(), f.train_positives.end(), f.test[0].word) == 0);
      CHECK(std::count(f.train_negatives.begin(), f.train_negatives.end(), f.test[0].word) == 0);
    }
    CHECK(held == std::multiset<std::string>{"a", "b", "c", "x", "y"});
  }

  TEST_CASE("fixed split yields one fold") {
    const auto folds = build_split(five(), SplitSpec::fixed({"a", "b", "x"}, {"c", "y"}));
    REQUIRE(folds.size() == 1);
    CHECK(folds[0].train_positives == std::vector<std::string>{"a", "b"});
    CHECK(folds[0].test.size() == 2);
  }

  TEST_CASE("degenerate folds") {
    PropertyDataset one("p");
    one.set("a", true, Provenance::kNorm);
    one.set("x", false, Provenance::kNorm);
    CHECK_THROWS_AS(build_split(one, SplitSpec::leave_one_out()), DegenerateFoldError);
    CHECK_THROWS_AS(build_split(five(), SplitSpec::fixed({"x"}, {"a"})), DegenerateFoldError);
  }

  TEST_CASE("fixed split errors") {
    CHECK_THROWS_AS(SplitSpec::fixed({"a"}, {"a"}), ConfigError);
    CHECK_THROWS_AS(build_split(five(), SplitSpec::fixed({"a", "q"}, {"x"})), ConfigError);
  }
}

TEST_SUITE("resolve") {
  TEST_CASE("skip lists OOV words, strict throws") {
    const auto m = matrix_of({{1, 0}, {0, 1}}, {"tiger", "Hepatitis_C"});
    PropertyDataset ds("p");
    ds.set("tiger", true, Provenance::kNorm);
    ds.set("Hepatitis C", false, Provenance::kNorm);
    ds.set("gryphon", true, Provenance::kNorm);
    const auto r = resolve(m, ds, OovPolicy::kSkip);
    CHECK(r.oov == std::vector<std::string>{"gryphon"});
    CHECK(r.dataset.size() == 2);
    CHECK(r.rows.at("Hepatitis C") == 1);
    CHECK_THROWS_AS(resolve(m, ds, OovPolicy::kStrict), MissingWordError);
  }
}

TEST_SUITE("dataset file") {
  TEST_CASE("round trip") {
    PropertyDataset ds("has_wheels");
    ds.set("car", true, Provenance::kNorm);
    ds.set("bike", true, Provenance::kCrowd);
    ds.set("apple", false, Provenance::kImplied);
    ds.set("wagon", true, Provenance::kSeedExpansion);
    std::stringstream s;
    write_dataset(ds, s);
    CHECK(s.str().rfind("# property: has_wheels\n", 0) == 0);
    CHECK(read_dataset(s) == ds);
  }

  TEST_CASE("save and load") {
    testing_support::TempDir dir;
    PropertyDataset ds("p");
    ds.set("a", true, Provenance::kNorm);
    save_dataset(ds, dir.path() / "p.tsv");
    CHECK(load_dataset(dir.path() / "p.tsv") == ds);
  }

  TEST_CASE("missing header and bad labels") {
    std::istringstream a("car\t1\tnorm\n");
    CHECK_THROWS_AS(read_dataset(a), FormatError);
    std::istringstream b("# property: p\ncar\tyes\tnorm\n");
    CHECK_THROWS_AS(read_dataset(b), FormatError);
    std::istringstream c("# property: p\ncar\t1\tnorm\ncar\t0\tnorm\n");
    CHECK_THROWS_AS(read_dataset(c), FormatError);
  }
}
