#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "semprobe/cli.hpp"
#include "semprobe/errors.hpp"
#include "support.hpp"

using namespace semprobe;
using testing_support::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Two small scenarios on disk: cross-cutting and cluster-aligned.
struct Fixture {
  TempDir dir;
  std::filesystem::path cross_vec, cross_ds, aligned_vec, aligned_ds;

  Fixture() {
    const std::vector<std::string> common{"--dim", "12", "--n-pos", "20", "--n-neg", "20", "--filler",
                                          "80", "--clusters", "4", "--signal-dims", "3", "--out-dir",
                                          (dir / "s").string()};
    for (const char* kind : {"cross-cutting", "cluster-aligned"}) {
      std::vector<std::string> args{"synth", "--kind", kind};
      args.insert(args.end(), common.begin(), common.end());
      REQUIRE(run_cli(args).code == 0);
    }
    cross_vec = dir / "s" / "synth_cross_cutting_s1.00.txt";
    cross_ds = dir / "s" / "synth_cross_cutting_s1.00.tsv";
    aligned_vec = dir / "s" / "synth_cluster_aligned_s1.00.txt";
    aligned_ds = dir / "s" / "synth_cluster_aligned_s1.00.tsv";
  }

  std::vector<std::string> evaluate(const std::filesystem::path& out) const {
    return {"evaluate", "--embeddings", cross_vec.string(), "--format", "text", "--dataset", cross_ds.string(),
            "--methods", "neigh,lr", "--n-grid", "10,20,40", "--out", out.string()};
  }
};

}  // namespace

TEST_CASE("version and help go to stdout with exit 0") {
  const auto v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.rfind("semprobe ", 0) == 0);
  const auto h = run_cli({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("evaluate") != std::string::npos);
  CHECK(run_cli({"evaluate", "--help"}).code == 0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"evaluate", "--no-such-flag"}).code == 2);
  CHECK(run_cli({"evaluate", "--jobs", "0"}).code == 2);
}

TEST_CASE("missing embeddings file exits 2 with a message") {
  TempDir d;
  const auto r = run_cli({"evaluate", "--embeddings", (d / "absent.bin").string(), "--dataset",
                          (d / "absent.tsv").string(), "--out", (d / "r.tsv").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("not found") != std::string::npos);
}

TEST_CASE("evaluate writes a report and reruns are byte-identical") {
  Fixture f;
  const auto a = run_cli(f.evaluate(f.dir / "a.tsv"));
  REQUIRE(a.code == 0);
  CHECK(run_cli(f.evaluate(f.dir / "b.tsv")).code == 0);
  const auto text = slurp(f.dir / "a.tsv");
  CHECK(text == slurp(f.dir / "b.tsv"));
  CHECK(text.find("synth_cross_cutting_s1.00\t20\t20\t") != std::string::npos);
  CHECK(text.find("# pool\t") != std::string::npos);
  CHECK(text.find("spearman-r") == std::string::npos);
}

TEST_CASE("two properties produce a spearman row") {
  Fixture f;
  auto args = f.evaluate(f.dir / "r.tsv");
  // both scenarios in one space: merge the embedding files
  std::ofstream merged(f.dir / "both.txt");
  std::ifstream a(f.cross_vec), b(f.aligned_vec);
  std::string header_a, header_b, line;
  std::getline(a, header_a);
  std::getline(b, header_b);
  std::vector<std::string> rows;
  while (std::getline(a, line)) rows.push_back(line);
  // tokens collide (w0001...), so the second space is renamed
  while (std::getline(b, line)) rows.push_back("b_" + line);
  merged << rows.size() << " 12\n";
  for (const auto& r : rows) merged << r << '\n';
  merged.close();
  std::ifstream ds(f.aligned_ds);
  std::ofstream renamed(f.dir / "aligned.tsv");
  while (std::getline(ds, line)) renamed << (line.rfind("#", 0) == 0 ? line : "b_" + line) << '\n';
  renamed.close();

  args[2] = (f.dir / "both.txt").string();
  args[6] = f.cross_ds.string() + "," + (f.dir / "aligned.tsv").string();
  const auto r = run_cli(args);
  REQUIRE(r.code == 0);
  const auto text = slurp(f.dir / "r.tsv");
  CHECK(text.find("spearman-r") != std::string::npos);
  CHECK(text.find("synth_cluster_aligned_s1.00") != std::string::npos);
}

TEST_CASE("markdown report and verdicts") {
  Fixture f;
  write_file(f.dir / "hyp.tsv", "synth_cross_cutting_s1.00\tyes\n");
  auto args = f.evaluate(f.dir / "r.md");
  args.insert(args.end(), {"--report-format", "markdown", "--hypotheses", (f.dir / "hyp.tsv").string(),
                           "--verdicts", (f.dir / "v.tsv").string()});
  REQUIRE(run_cli(args).code == 0);
  CHECK(slurp(f.dir / "r.md").find("| property |") != std::string::npos);
  const auto v = slurp(f.dir / "v.tsv");
  CHECK(v.rfind("property\texpected\tobserved\tbest-f1\tverdict\n", 0) == 0);
  CHECK(v.find("synth_cross_cutting_s1.00\tyes\t") != std::string::npos);

  auto no_verdicts = f.evaluate(f.dir / "x.tsv");
  no_verdicts.insert(no_verdicts.end(), {"--hypotheses", (f.dir / "hyp.tsv").string()});
  CHECK(run_cli(no_verdicts).code == 2);
}

TEST_CASE("config file values and precedence") {
  Fixture f;
  write_file(f.dir / "run.conf",
             "schema = 1\n"
             "format = text\n"
             "norms = ignored-by-evaluate.tsv\n"
             "[evaluate]\n"
             "methods = lr\n"
             "n_grid = 10,20\n");
  auto args = f.evaluate(f.dir / "r.tsv");
  // drop --methods from the command line so the file decides
  args.erase(args.begin() + 7, args.begin() + 9);
  args.insert(args.end(), {"--config", (f.dir / "run.conf").string()});
  REQUIRE(run_cli(args).code == 0);
  const auto text = slurp(f.dir / "r.tsv");
  CHECK(text.find("synth_cross_cutting_s1.00\t20\t20\t0.23\t-\t-\t") != std::string::npos);
  CHECK(text.find("f1-net") == std::string::npos);
  // the explicit --n-grid beats the file
  CHECK(text.find("# n-grid\t10,20,40") != std::string::npos);
}

TEST_CASE("config file errors exit 2") {
  Fixture f;
  write_file(f.dir / "noschema.conf", "format = text\n");
  write_file(f.dir / "unknown.conf", "schema = 1\n[evaluate]\nbogus = 1\n");
  for (const char* name : {"noschema.conf", "unknown.conf", "missing.conf"}) {
    auto args = f.evaluate(f.dir / "r.tsv");
    args.insert(args.end(), {"--config", (f.dir / name).string()});
    CHECK(run_cli(args).code == 2);
  }
}

TEST_CASE("sweep and expand outputs") {
  Fixture f;
  REQUIRE(run_cli({"sweep", "--embeddings", f.cross_vec.string(), "--format", "text", "--dataset",
                   f.cross_ds.string(), "--n-grid", "10,20", "--out", (f.dir / "s.tsv").string()})
              .code == 0);
  const auto s = slurp(f.dir / "s.tsv");
  CHECK(s.find("n\ttp\tfp\ttn\tfn\tprecision\trecall\tf1\n10\t") != std::string::npos);

  REQUIRE(run_cli({"expand", "--embeddings", f.cross_vec.string(), "--format", "text", "--dataset",
                   f.cross_ds.string(), "--seed-words", "w0001", "--n", "3", "--out", (f.dir / "e.tsv").string()})
              .code == 0);
  std::istringstream e(slurp(f.dir / "e.tsv"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(e, line)) {
    ++lines;
    CHECK(line.find('\t') != std::string::npos);
  }
  CHECK(lines >= 1);
  CHECK(lines <= 6);
}

TEST_CASE("build from norms, rules and crowd") {
  TempDir d;
  write_file(d / "norms.tsv",
             "falcon\tis_a_bird\ntiger\tis_an_animal\ntiger\tis_dangerous\napple\tis_food\n"
             "car\thas_wheels\nbus\thas_wheels\n");
  write_file(d / "rules.tsv", "is_a_bird\timplies\tis_an_animal\nis_food\texcludes\tis_an_animal\n");
  write_file(d / "crowd.csv", "word,property,answer\ncar,is_an_animal,no\n");
  const auto r = run_cli({"build", "--norms", (d / "norms.tsv").string(), "--rules", (d / "rules.tsv").string(),
                          "--crowd", (d / "crowd.csv").string(), "--properties", "is_an_animal", "--min-concepts",
                          "1", "--out-dir", (d / "out").string()});
  REQUIRE(r.code == 0);
  const auto ds = load_dataset(d / "out" / "is_an_animal.tsv");
  CHECK(ds.positives() == std::vector<std::string>{"falcon", "tiger"});
  CHECK(ds.negatives() == std::vector<std::string>{"apple", "car"});

  SUBCASE("empty crowd file changes nothing") {
    write_file(d / "empty.csv", "");
    REQUIRE(run_cli({"build", "--norms", (d / "norms.tsv").string(), "--rules", (d / "rules.tsv").string(),
                     "--crowd", (d / "empty.csv").string(), "--properties", "is_an_animal", "--min-concepts", "1",
                     "--out-dir", (d / "out2").string()})
                .code == 0);
    CHECK(load_dataset(d / "out2" / "is_an_animal.tsv").negatives() == std::vector<std::string>{"apple"});
  }

  SUBCASE("conflicting rules fail with the concept named") {
    write_file(d / "bad.tsv", "is_dangerous\texcludes\tis_an_animal\n");
    const auto bad = run_cli({"build", "--norms", (d / "norms.tsv").string(), "--rules", (d / "bad.tsv").string(),
                              "--properties", "is_an_animal", "--min-concepts", "1", "--out-dir",
                              (d / "out3").string()});
    CHECK(bad.code != 0);
    CHECK(bad.err.find("conflicting") != std::string::npos);
    CHECK(bad.err.find("tiger") != std::string::npos);
  }
}

TEST_CASE("synth spec file with flag override") {
  TempDir d;
  write_file(d / "s.spec", "kind\tabsent\ndim\t8\nn_pos\t12\nn_neg\t12\nn_filler\t10\n");
  REQUIRE(run_cli({"synth", "--spec", (d / "s.spec").string(), "--dim", "9", "--out-dir", (d / "o").string()})
              .code == 0);
  const auto spec = load_scenario_spec(d / "o" / "synth_absent_s1.00.spec");
  CHECK(spec.dim == 9);
  CHECK(spec.n_pos == 12);
  CHECK(spec.kind == ScenarioKind::kAbsent);
  CHECK(run_cli({"synth", "--kind", "planted", "--out-dir", (d / "p").string()}).code == 2);
}

TEST_CASE("installed binary maps exit codes") {
  const char* bin = std::getenv("SEMPROBE_BIN");
  if (bin == nullptr) return;
  TempDir d;
  const std::string quiet = " >" + (d / "o").string() + " 2>" + (d / "e").string();
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(bin) + " " + args + quiet).c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("--version") == 0);
  CHECK(slurp(d / "o").rfind("semprobe ", 0) == 0);
  CHECK(status("evaluate --embeddings /nonexistent.bin --dataset /nonexistent.tsv --out x") == 2);
  CHECK(slurp(d / "e").find("error:") != std::string::npos);
}
