#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>

#include "../text_util.hpp"
#include "semprobe/cli.hpp"
#include "semprobe/errors.hpp"

namespace semprobe::cli {
namespace {

constexpr const char* kVersion = SEMPROBE_VERSION;
constexpr std::string_view kSchema = "1";

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& part : text::split(text, ',')) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

template <typename T>
std::vector<T> split_numbers(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const auto& part : split_list(text)) {
    T v{};
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw ConfigError(std::string("bad value '") + part + "' in " + what);
    }
    out.push_back(v);
  }
  return out;
}

// Raw text of list options, split after parsing.
struct ListArgs {
  std::string datasets;
  std::string methods = "neigh,lr,net";
  std::string seeds = "1,2";
  std::string n_grid = "100,200,300,400,500,600,700,800,900,1000";
  std::string properties;
  std::string seed_words;
};

struct SynthArgs {
  std::string kind;
  CLI::Option* kind_opt = nullptr;
  std::map<std::string, CLI::Option*> fields;  // by flag name
};

void add_common(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "key = value config file (schema = 1); flags override it");
  sub->add_option("--jobs", c.jobs, "worker threads for fold evaluation")->check(CLI::PositiveNumber);
}

void add_embedding_options(CLI::App* sub, RunConfig& c, ListArgs& lists) {
  sub->add_option("--embeddings", c.embeddings, "word2vec embedding file");
  sub->add_option("--format", c.format, "binary or text")->capture_default_str();
  sub->add_option("--max-vocab", c.max_vocab, "keep only the first K rows (0 keeps all)");
  sub->add_option("--dataset", lists.datasets, "dataset TSV file(s), comma-separated");
  sub->add_option("--oov", c.oov, "skip or strict")->capture_default_str();
  sub->add_option("--out", c.out, "output file");
}

void add_pool_options(CLI::App* sub, RunConfig& c, ListArgs& lists) {
  sub->add_option("--pool-vocab", c.pool_vocab, "neighbour pool: first K vocabulary rows (0: all)");
  sub->add_option("--pool-file", c.pool_file, "neighbour pool: one token per line");
  sub->add_option("--n-grid", lists.n_grid, "neighbourhood sizes, comma-separated")->capture_default_str();
}

std::vector<std::string> option_names(const CLI::App* sub) {
  std::vector<std::string> names;
  for (const auto* opt : sub->get_options()) {
    for (const auto& l : opt->get_lnames()) names.push_back(l);
  }
  return names;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const SpecError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace

std::vector<std::string> config_arguments(const std::filesystem::path& path, const std::string& command,
                                          const std::vector<std::string>& known_options) {
  std::ifstream in(path);
  if (!in) throw IoError("config file not found: '" + path.string() + "'");
  std::vector<std::string> args;
  std::string section;
  bool schema_seen = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::trim(text::strip_cr(raw));
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "schema") {
      if (!section.empty()) throw ConfigError(path.string() + ": schema belongs at the top level");
      if (value != kSchema) throw ConfigError(path.string() + ": unsupported schema '" + value + "' (expected 1)");
      schema_seen = true;
      continue;
    }
    if (key == "config") throw ConfigError(path.string() + ": config files cannot include other config files");
    if (!section.empty() && section != command) continue;
    const bool known = std::find(known_options.begin(), known_options.end(), key) != known_options.end();
    if (!known) {
      if (section.empty()) continue;  // meant for another subcommand
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": '" + key + "' is not an option of " +
                        command);
    }
    args.push_back("--" + key + "=" + value);
  }
  if (!schema_seen) throw ConfigError(path.string() + ": missing 'schema = 1'");
  return args;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  ListArgs lists;
  SynthArgs synth;
  std::string config_path;
  bool show_version = false;

  CLI::App app{"Probe word embeddings for semantic properties", "semprobe"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_flag("--version", show_version, "print the version and exit");
  app.require_subcommand(0, 1);

  auto* build = app.add_subcommand("build", "build labelled datasets from property norms, rules and crowd judgments");
  add_common(build, c, config_path);
  build->add_option("--norms", c.norms, "concept<TAB>property TSV");
  build->add_option("--rules", c.rules, "source<TAB>implies|excludes<TAB>target TSV (default: built-in examples)");
  build->add_option("--crowd", c.crowd, "word,property,answer CSV");
  build->add_option("--properties", lists.properties, "properties to build, comma-separated (default: all selected)");
  build->add_option("--min-concepts", c.min_concepts, "keep properties listed for at least this many concepts")
      ->capture_default_str();
  build->add_flag("--naive", c.naive, "listed concepts positive, all others negative");
  build->add_option("--out-dir", c.out_dir, "directory for <property>.tsv files");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate probes and write the report table");
  add_common(evaluate, c, config_path);
  add_embedding_options(evaluate, c, lists);
  add_pool_options(evaluate, c, lists);
  evaluate->add_option("--methods", lists.methods, "neigh, lr, net (comma-separated)")->capture_default_str();
  evaluate->add_option("--seeds", lists.seeds, "one network per seed (comma-separated)")->capture_default_str();
  evaluate->add_option("--split", c.split, "fixed split file word<TAB>train|test (default: leave-one-out)");
  evaluate->add_option("--hypotheses", c.hypotheses, "property<TAB>yes|possibly|no TSV");
  evaluate->add_option("--verdicts", c.verdicts, "verdict table output (with --hypotheses)");
  evaluate->add_option("--learnable", c.thresholds.learnable, "f1 at or above which a property is learnable")
      ->capture_default_str();
  evaluate->add_option("--possibly", c.thresholds.possibly, "f1 at or above which a property is possibly learnable")
      ->capture_default_str();
  evaluate->add_option("--report-format", c.report_format, "tsv or markdown")->capture_default_str();
  evaluate->add_option("--lr-l2", c.lr_l2, "logistic L2 penalty")->capture_default_str();
  evaluate->add_option("--lr-tol", c.lr_tol, "logistic gradient tolerance")->capture_default_str();
  evaluate->add_option("--lr-max-iter", c.lr_max_iter, "logistic iteration limit")->capture_default_str();
  evaluate->add_option("--net-l2", c.net_l2, "network L2 penalty")->capture_default_str();
  evaluate->add_option("--net-tol", c.net_tol, "network gradient tolerance")->capture_default_str();
  evaluate->add_option("--net-max-iter", c.net_max_iter, "network iteration limit")->capture_default_str();
  evaluate->add_option("--net-optimizer", c.net_optimizer, "lbfgs or gd")->capture_default_str();
  evaluate->add_flag("--synth-battery", c.synth_battery, "evaluate the 15-scenario synthetic battery");
  evaluate->add_option("--synth-seed", c.synth_seed, "seed of the synthetic battery")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "centroid F1 for every neighbourhood size");
  add_common(sweep, c, config_path);
  add_embedding_options(sweep, c, lists);
  add_pool_options(sweep, c, lists);

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic scenarios (word2vec text + dataset)");
  add_common(synth_cmd, c, config_path);
  synth_cmd->add_option("--spec", c.scenario_file, "scenario spec file key<TAB>value");
  synth_cmd->add_flag("--battery", c.battery, "write the 15-scenario battery");
  synth_cmd->add_option("--out-dir", c.out_dir, "output directory");
  synth.kind_opt = synth_cmd->add_option("--kind", synth.kind, "cluster-aligned, cross-cutting or absent");
  auto& spec = c.scenario;
  auto scenario_option = [&](const char* name, auto& field, const char* help) {
    synth.fields[name] = synth_cmd->add_option(name, field, help)->capture_default_str();
  };
  scenario_option("--dim", spec.dim, "dimensionality");
  scenario_option("--n-pos", spec.n_pos, "positive words");
  scenario_option("--n-neg", spec.n_neg, "negative words");
  scenario_option("--clusters", spec.cluster_count, "cluster count");
  scenario_option("--spread", spec.cluster_spread, "within-cluster noise scale");
  scenario_option("--signal-dims", spec.signal_dims, "dimensions carrying the property");
  scenario_option("--signal-strength", spec.signal_strength, "offset per signal dimension");
  scenario_option("--seed", spec.seed, "generator seed");
  scenario_option("--filler", spec.n_filler, "unlabelled background words");
  scenario_option("--center-scale", spec.center_scale, "scale of cluster centres");

  auto* expand = app.add_subcommand("expand", "annotation candidates near the positive centroid and seed words");
  add_common(expand, c, config_path);
  add_embedding_options(expand, c, lists);
  expand->add_option("--seed-words", lists.seed_words, "seed words, comma-separated");
  expand->add_option("--n", c.expand_n, "neighbours per query")->capture_default_str();

  try {
    std::vector<std::string> argv = args;
    const bool has_command = !argv.empty() && !argv.front().empty() && argv.front().front() != '-';
    if (has_command) {
      if (const auto path = find_config(argv)) {
        if (auto* sub = app.get_subcommand_no_throw(argv.front())) {
          const auto extra = config_arguments(*path, argv.front(), option_names(sub));
          argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        }
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }

  if (show_version) {
    out << "semprobe " << kVersion << '\n';
    return 0;
  }
  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    out << app.help();
    return 2;
  }
  c.command = subs.front()->get_name();

  try {
    if (!lists.datasets.empty()) {
      c.datasets.clear();
      for (const auto& d : split_list(lists.datasets)) c.datasets.emplace_back(d);
    }
    c.methods = split_list(lists.methods);
    c.seeds = split_numbers<std::uint64_t>(lists.seeds, "--seeds");
    c.n_grid = split_numbers<std::size_t>(lists.n_grid, "--n-grid");
    c.properties = split_list(lists.properties);
    c.seed_words = split_list(lists.seed_words);
    if (c.command == "synth") {
      if (!c.scenario_file.empty()) {
        // File first, then any flag given explicitly.
        const ScenarioSpec from_flags = c.scenario;
        c.scenario = load_scenario_spec(c.scenario_file);
        auto pick = [&](const char* flag, auto member) {
          if (synth.fields.at(flag)->count() > 0) c.scenario.*member = from_flags.*member;
        };
        pick("--dim", &ScenarioSpec::dim);
        pick("--n-pos", &ScenarioSpec::n_pos);
        pick("--n-neg", &ScenarioSpec::n_neg);
        pick("--clusters", &ScenarioSpec::cluster_count);
        pick("--spread", &ScenarioSpec::cluster_spread);
        pick("--signal-dims", &ScenarioSpec::signal_dims);
        pick("--signal-strength", &ScenarioSpec::signal_strength);
        pick("--seed", &ScenarioSpec::seed);
        pick("--filler", &ScenarioSpec::n_filler);
        pick("--center-scale", &ScenarioSpec::center_scale);
      }
      if (synth.kind_opt->count() > 0) {
        const auto kind = parse_scenario_kind(synth.kind);
        if (!kind) throw ConfigError("unknown scenario kind '" + synth.kind + "'");
        c.scenario.kind = *kind;
        if (*kind == ScenarioKind::kAbsent && synth.fields.at("--signal-strength")->count() == 0) c.scenario.signal_strength = 0.0;
      }
      cmd_synth(c, err);
    } else if (c.command == "build") {
      cmd_build(c, err);
    } else if (c.command == "evaluate") {
      cmd_evaluate(c, err);
    } else if (c.command == "sweep") {
      cmd_sweep(c, err);
    } else {
      cmd_expand(c, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace semprobe::cli
