#pragma once

// Command-line front end: build, evaluate, sweep, synth, expand.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "semprobe/evaluation.hpp"
#include "semprobe/synthbench.hpp"

namespace semprobe::cli {

// Everything a subcommand needs. Lists arrive as comma-separated strings on
// the command line and are split during parsing.
struct RunConfig {
  std::string command;

  std::filesystem::path embeddings;
  std::string format = "binary";
  std::size_t max_vocab = 0;  // 0 keeps every row

  // build
  std::filesystem::path norms;
  std::filesystem::path rules;
  std::filesystem::path crowd;
  std::vector<std::string> properties;
  std::size_t min_concepts = 20;
  bool naive = false;

  // evaluate / sweep / expand
  std::vector<std::filesystem::path> datasets;
  std::vector<std::string> methods{"neigh", "lr", "net"};
  std::vector<std::uint64_t> seeds{1, 2};
  std::vector<std::size_t> n_grid = default_n_grid();
  std::string oov = "skip";
  std::size_t pool_vocab = 0;  // 0 means the full vocabulary
  std::filesystem::path pool_file;
  std::filesystem::path split;
  std::filesystem::path hypotheses;
  std::filesystem::path verdicts;
  Thresholds thresholds;
  double lr_l2 = 1.0;
  double lr_tol = 1e-4;
  std::size_t lr_max_iter = 100;
  double net_l2 = 1e-4;
  double net_tol = 1e-4;
  std::size_t net_max_iter = 200;
  std::string net_optimizer = "lbfgs";
  bool synth_battery = false;
  std::uint64_t synth_seed = 1;

  // synth
  ScenarioSpec scenario;
  std::filesystem::path scenario_file;
  bool battery = false;

  // expand
  std::vector<std::string> seed_words;
  std::size_t expand_n = 100;

  std::filesystem::path out;
  std::filesystem::path out_dir;
  std::string report_format = "tsv";
  std::size_t jobs = 1;
};

// Parses `args` (without the program name), runs the subcommand and returns
// the exit code: 0 on success, 2 for usage errors and missing inputs, 1 for
// any other failure. Help and version text go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Arguments equivalent to the `key = value` lines of a config file for
// `command`. Top-level keys apply when the command knows the option;
// keys under a `[command]` section must be known by it. The file must
// declare `schema = 1`.
std::vector<std::string> config_arguments(const std::filesystem::path& path, const std::string& command,
                                          const std::vector<std::string>& known_options);

// Checks inputs exist and choices are valid; throws ConfigError or IoError.
void validate(const RunConfig& config);

EvalConfig eval_config(const RunConfig& config);

void cmd_build(const RunConfig& config, std::ostream& log);
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_sweep(const RunConfig& config, std::ostream& log);
void cmd_synth(const RunConfig& config, std::ostream& log);
void cmd_expand(const RunConfig& config, std::ostream& log);

}  // namespace semprobe::cli
