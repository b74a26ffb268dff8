#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "../text_util.hpp"
#include "semprobe/cli.hpp"
#include "semprobe/errors.hpp"

namespace semprobe::cli {
namespace {

void require_file(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError(std::string(what) + " file not found: '" + path.string() + "'");
  }
}

void optional_file(const std::filesystem::path& path, const char* what) {
  if (!path.empty()) require_file(path, what);
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.empty()) throw ConfigError("missing --out");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

EmbeddingMatrix load_matrix(const RunConfig& c) {
  const auto format = parse_embedding_format(c.format);
  if (!format) throw ConfigError("unknown embedding format '" + c.format + "'");
  LoadOptions options;
  options.max_vocab = c.max_vocab;
  return load_embeddings(c.embeddings, *format, options);
}

CandidatePool make_pool(const RunConfig& c, const EmbeddingMatrix& matrix) {
  if (!c.pool_file.empty()) {
    std::ifstream in(c.pool_file);
    if (!in) throw IoError("cannot open pool file '" + c.pool_file.string() + "'");
    std::vector<std::string> tokens;
    text::for_each_record(in, [&](std::string_view line, std::size_t) { tokens.emplace_back(text::trim(line)); });
    return CandidatePool::from_tokens(matrix, tokens);
  }
  if (c.pool_vocab != 0) {
    std::vector<std::size_t> rows(std::min(c.pool_vocab, matrix.size()));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return CandidatePool::from_rows(std::move(rows));
  }
  return CandidatePool::full_vocabulary();
}

// "word<TAB>train|test" lines.
SplitSpec load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file '" + path.string() + "'");
  std::set<std::string> train;
  std::set<std::string> test;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, '\t');
    const auto side = fields.size() == 2 ? text::trim(fields[1]) : std::string_view();
    if (side != "train" && side != "test") {
      throw FormatError("expected 'word<TAB>train|test'", FormatError::Unit::kLine, line_no);
    }
    (side == "train" ? train : test).insert(std::string(text::trim(fields[0])));
  });
  return SplitSpec::fixed(std::move(train), std::move(test));
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::string grid_text(const std::vector<std::size_t>& grid) {
  std::vector<std::string> parts;
  for (auto n : grid) parts.push_back(std::to_string(n));
  return join(parts);
}

void log_report(std::ostream& log, const PropertyEvaluation& ev) {
  const auto& r = ev.report;
  log << "evaluated " << r.property << " (" << r.pos_count << " pos / " << r.neg_count << " neg";
  if (!r.oov.empty()) log << ", " << r.oov.size() << " oov";
  log << ")\n";
  for (const auto& d : ev.details) {
    if (d.unconverged_folds != 0) {
      log << "  note: " << method_name(d.method) << (d.method == Method::kNet ? " seed " + std::to_string(d.seed) : "")
          << " hit the iteration limit in " << d.unconverged_folds << " of " << d.items.size() << " folds\n";
    }
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.jobs == 0) throw ConfigError("--jobs must be at least 1");
  if (c.command == "build") {
    require_file(c.norms, "norms");
    optional_file(c.rules, "rules");
    optional_file(c.crowd, "crowd");
    if (c.out_dir.empty()) throw ConfigError("missing --out-dir");
    if (c.min_concepts == 0) throw ConfigError("--min-concepts must be at least 1");
    return;
  }
  if (c.command == "synth") {
    optional_file(c.scenario_file, "spec");
    if (c.out_dir.empty()) throw ConfigError("missing --out-dir");
    return;
  }
  if (!parse_embedding_format(c.format)) throw ConfigError("unknown embedding format '" + c.format + "'");
  if (c.oov != "skip" && c.oov != "strict") throw ConfigError("--oov must be skip or strict");
  if (c.out.empty()) throw ConfigError("missing --out");
  if (c.command == "evaluate") {
    if (c.methods.empty()) throw ConfigError("at least one method must be selected");
    for (const auto& m : c.methods) {
      if (!parse_method(m)) throw ConfigError("unknown method '" + m + "' (expected neigh, lr or net)");
    }
    if (!parse_report_format(c.report_format)) throw ConfigError("unknown report format '" + c.report_format + "'");
    if (c.net_optimizer != "lbfgs" && c.net_optimizer != "gd") throw ConfigError("--net-optimizer must be lbfgs or gd");
    if (!c.hypotheses.empty() && c.verdicts.empty()) throw ConfigError("--hypotheses needs --verdicts");
    optional_file(c.hypotheses, "hypotheses");
    if (c.synth_battery) {
      if (!c.datasets.empty() || !c.embeddings.empty()) {
        throw ConfigError("--synth-battery generates its own embeddings and datasets");
      }
      return;
    }
  }
  require_file(c.embeddings, "embeddings");
  if (c.datasets.empty()) throw ConfigError("missing --dataset");
  for (const auto& d : c.datasets) require_file(d, "dataset");
  if (c.command != "evaluate" && c.datasets.size() != 1) {
    throw ConfigError(c.command + " takes exactly one --dataset");
  }
  optional_file(c.pool_file, "pool");
  optional_file(c.split, "split");
  if (c.command == "expand") {
    if (c.expand_n == 0) throw ConfigError("--n must be at least 1");
  }
  if (c.n_grid.empty()) throw ConfigError("--n-grid is empty");
  for (auto n : c.n_grid) {
    if (n == 0) throw ConfigError("--n-grid values must be at least 1");
  }
}

EvalConfig eval_config(const RunConfig& c) {
  EvalConfig e;
  e.methods.clear();
  for (const auto& m : c.methods) {
    const auto parsed = parse_method(m);
    if (!parsed) throw ConfigError("unknown method '" + m + "'");
    e.methods.push_back(*parsed);
  }
  e.seeds = c.seeds;
  e.logistic = {c.lr_l2, c.lr_tol, c.lr_max_iter};
  e.mlp.l2_penalty = c.net_l2;
  e.mlp.tolerance = c.net_tol;
  e.mlp.max_iterations = c.net_max_iter;
  e.mlp.optimizer = c.net_optimizer == "gd" ? optim::Method::kGradientDescent : optim::Method::kLbfgs;
  e.n_grid = c.n_grid;
  e.oov = c.oov == "strict" ? OovPolicy::kStrict : OovPolicy::kSkip;
  e.jobs = c.jobs;
  return e;
}

void cmd_build(const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto table = ingest_norms(c.norms);
  const auto rules = c.rules.empty() ? default_rules() : load_rules(c.rules);
  const auto crowd = c.crowd.empty() ? std::vector<CrowdJudgment>{} : load_crowd(c.crowd);
  const auto properties = c.properties.empty() ? select_properties(table, c.min_concepts) : c.properties;
  if (properties.empty()) throw ConfigError("no property reaches --min-concepts " + std::to_string(c.min_concepts));

  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create '" + c.out_dir.string() + "': " + ec.message());
  for (const auto& p : properties) {
    auto ds = c.naive ? naive_dataset(table, p) : apply_implications(table, rules, p);
    ds = merge_crowd(ds, crowd);
    const auto path = c.out_dir / (p + ".tsv");
    save_dataset(ds, path);
    log << p << ": " << ds.positive_count() << " pos / " << ds.negative_count() << " neg -> " << path.string() << '\n';
  }
}

void cmd_evaluate(const RunConfig& c, std::ostream& log) {
  validate(c);
  const EvalConfig base = eval_config(c);
  ReportTable table;
  table.meta["oov-policy"] = c.oov;
  table.meta["n-grid"] = grid_text(c.n_grid);

  if (c.synth_battery) {
    table.meta["pool"] = "full vocabulary";
    table.meta["source"] = "synthetic battery, seed " + std::to_string(c.synth_seed);
    for (const auto& spec : standard_battery(c.synth_seed)) {
      const auto scenario = generate_scenario(spec);
      const auto ev = evaluate_property(scenario.matrix, scenario.dataset, SplitSpec::leave_one_out(), base);
      log_report(log, ev);
      table.rows.push_back(ev.report);
    }
  } else {
    const auto matrix = load_matrix(c);
    EvalConfig config = base;
    config.pool = make_pool(c, matrix);
    table.meta["pool"] = config.pool.describe(matrix);
    const SplitSpec split = c.split.empty() ? SplitSpec::leave_one_out() : load_split(c.split);
    for (const auto& path : c.datasets) {
      const auto dataset = load_dataset(path);
      const auto ev = evaluate_property(matrix, dataset, split, config);
      log_report(log, ev);
      table.rows.push_back(ev.report);
    }
  }
  table.spearman = spearman_summary(table.rows);
  save_report(table, *parse_report_format(c.report_format), c.out);

  if (!c.hypotheses.empty()) {
    const auto verdicts = compare_hypotheses(table.rows, load_hypotheses(c.hypotheses), c.thresholds);
    auto out = open_output(c.verdicts);
    write_verdicts(verdicts, out);
    finish(out, c.verdicts);
  }
}

void cmd_sweep(const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto matrix = load_matrix(c);
  const auto dataset = load_dataset(c.datasets.front());
  const auto pool = make_pool(c, matrix);
  const auto result = sweep_n(matrix, dataset, pool, c.n_grid, eval_config(c).oov, c.jobs);

  auto out = open_output(c.out);
  out << "# property\t" << dataset.property() << '\n';
  out << "# pool\t" << pool.describe(matrix) << '\n';
  out << "# best-n\t" << result.best_n << '\n';
  out << "n\ttp\tfp\ttn\tfn\tprecision\trecall\tf1\n";
  char buf[128];
  for (const auto& p : result.per_n) {
    const auto s = f1(p.counts);
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.4f", s.precision, s.recall, s.f1);
    out << p.n << '\t' << p.counts.tp << '\t' << p.counts.fp << '\t' << p.counts.tn << '\t' << p.counts.fn << '\t'
        << buf << '\n';
  }
  if (!result.oov.empty()) out << "# oov\t" << join(result.oov) << '\n';
  finish(out, c.out);
  log << dataset.property() << ": best n " << result.best_n << ", f1 " << result.best_f1 << '\n';
}

void cmd_synth(const RunConfig& c, std::ostream& log) {
  validate(c);
  std::vector<ScenarioSpec> specs;
  if (c.battery) {
    specs = standard_battery(c.scenario.seed);
  } else {
    specs.push_back(c.scenario);
  }
  for (const auto& spec : specs) {
    const auto paths = export_scenario(generate_scenario(spec), c.out_dir);
    log << "wrote " << paths.embeddings.string() << ", " << paths.dataset.string() << '\n';
  }
}

void cmd_expand(const RunConfig& c, std::ostream& log) {
  validate(c);
  const auto matrix = load_matrix(c);
  const auto dataset = load_dataset(c.datasets.front());
  const auto candidates = expand_candidates(matrix, dataset, c.seed_words, c.expand_n, eval_config(c).oov);
  auto out = open_output(c.out);
  char buf[64];
  for (const auto& cand : candidates) {
    std::snprintf(buf, sizeof buf, "%.6f", cand.similarity);
    out << cand.token << '\t' << buf << '\n';
  }
  finish(out, c.out);
  log << candidates.size() << " candidates for " << dataset.property() << '\n';
}

}  // namespace semprobe::cli
