#include "semprobe/synthbench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "semprobe/errors.hpp"
#include "text_util.hpp"

namespace semprobe {

std::string_view scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kClusterAligned:
      return "cluster-aligned";
    case ScenarioKind::kCrossCutting:
      return "cross-cutting";
    case ScenarioKind::kAbsent:
      return "absent";
  }
  return "absent";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name) {
  for (auto k : {ScenarioKind::kClusterAligned, ScenarioKind::kCrossCutting, ScenarioKind::kAbsent}) {
    if (scenario_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string ScenarioSpec::property_name() const {
  std::string kind_part(scenario_kind_name(kind));
  std::replace(kind_part.begin(), kind_part.end(), '-', '_');
  return "synth_" + kind_part + "_s" + two_decimals(cluster_spread);
}

void validate(const ScenarioSpec& s) {
  auto fail = [](const std::string& msg) { throw SpecError("invalid scenario: " + msg); };
  if (s.dim == 0) fail("dim must be positive");
  if (s.signal_dims > s.dim) fail("signal_dims exceeds dim");
  if (s.n_pos < 10 || s.n_neg < 10) fail("n_pos and n_neg must each be at least 10");
  if (s.cluster_count == 0) fail("cluster_count must be positive");
  if (s.kind == ScenarioKind::kClusterAligned && s.cluster_count < 2) {
    fail("cluster-aligned needs at least 2 clusters");
  }
  if (!std::isfinite(s.cluster_spread) || s.cluster_spread < 0.0) fail("cluster_spread must be finite and >= 0");
  if (!std::isfinite(s.center_scale) || s.center_scale < 0.0) fail("center_scale must be finite and >= 0");
  if (!std::isfinite(s.signal_strength)) fail("signal_strength must be finite");
  if (s.kind != ScenarioKind::kAbsent) {
    if (!(s.signal_strength > 0.0)) fail("signal_strength must be positive");
    if (s.signal_dims == 0) fail("signal_dims must be positive");
  }
}

Scenario generate_scenario(const ScenarioSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t d = spec.dim;
  const std::size_t k = spec.cluster_count;
  const std::size_t labelled = spec.n_pos + spec.n_neg;
  const std::size_t total = labelled + spec.n_filler;

  std::vector<std::size_t> dims(d);
  std::iota(dims.begin(), dims.end(), std::size_t{0});
  std::shuffle(dims.begin(), dims.end(), rng);
  dims.resize(spec.signal_dims);
  std::sort(dims.begin(), dims.end());

  std::vector<double> offset(d, 0.0);
  if (spec.kind != ScenarioKind::kAbsent) {
    std::bernoulli_distribution coin(0.5);
    for (std::size_t j : dims) offset[j] = coin(rng) ? spec.signal_strength : -spec.signal_strength;
  }

  std::vector<bool> is_signal(d, false);
  for (std::size_t j : dims) is_signal[j] = true;
  std::vector<double> centers(k * d, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = spec.center_scale * gauss(rng);
      if (!is_signal[j]) centers[c * d + j] = v;
    }
  }

  // Role order: labelled words first (positives then negatives, except for
  // the absent kind whose labels are shuffled), then filler.
  std::vector<std::uint8_t> labels(labelled, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.n_pos), 1);
  if (spec.kind == ScenarioKind::kAbsent) std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::size_t> cluster(total);
  for (std::size_t i = 0; i < total; ++i) {
    const bool filler = i >= labelled;
    switch (spec.kind) {
      case ScenarioKind::kClusterAligned: {
        if (!filler && labels[i]) {
          cluster[i] = 0;
        } else {
          const std::size_t j = filler ? i - labelled : i - spec.n_pos;
          cluster[i] = 1 + j % (k - 1);
        }
        break;
      }
      case ScenarioKind::kCrossCutting: {
        const std::size_t j = filler ? i - labelled : (labels[i] ? i : i - spec.n_pos);
        cluster[i] = j % k;
        break;
      }
      case ScenarioKind::kAbsent:
        cluster[i] = (filler ? i - labelled : i) % k;
        break;
    }
  }

  std::vector<std::size_t> row_of(total);
  std::iota(row_of.begin(), row_of.end(), std::size_t{0});
  std::shuffle(row_of.begin(), row_of.end(), rng);

  std::vector<float> data(total * d);
  for (std::size_t i = 0; i < total; ++i) {
    const bool planted = i < labelled && labels[i] && spec.kind != ScenarioKind::kAbsent;
    float* out = data.data() + row_of[i] * d;
    for (std::size_t j = 0; j < d; ++j) {
      double v = centers[cluster[i] * d + j] + spec.cluster_spread * gauss(rng);
      if (planted) v += offset[j];
      out[j] = static_cast<float>(v);
    }
  }

  const std::size_t width = std::max<std::size_t>(4, std::to_string(total).size());
  std::vector<std::string> vocab(total);
  for (std::size_t r = 0; r < total; ++r) {
    std::string digits = std::to_string(r + 1);
    vocab[r] = "w" + std::string(width - digits.size(), '0') + digits;
  }

  PropertyDataset dataset(spec.property_name());
  for (std::size_t i = 0; i < labelled; ++i) dataset.set(vocab[row_of[i]], labels[i] != 0, Provenance::kNorm);

  return Scenario{spec, EmbeddingMatrix(std::move(vocab), d, std::move(data)), std::move(dataset), std::move(dims)};
}

std::vector<double> battery_spreads() { return {0.5, 1.0, 1.5, 2.0, 2.5}; }

std::vector<ScenarioSpec> standard_battery(std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  for (auto kind : {ScenarioKind::kClusterAligned, ScenarioKind::kCrossCutting, ScenarioKind::kAbsent}) {
    for (double spread : battery_spreads()) {
      ScenarioSpec s;
      s.kind = kind;
      s.cluster_spread = spread;
      s.seed = seed;
      if (kind == ScenarioKind::kAbsent) s.signal_strength = 0.0;
      out.push_back(s);
    }
  }
  return out;
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view key, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("bad value '" + std::string(s) + "' for '" + std::string(key) + "'",
                      FormatError::Unit::kLine, line_no);
  }
  return v;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ScenarioSpec read_scenario_spec(std::istream& in) {
  ScenarioSpec s;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw FormatError("expected 'key<TAB>value'", FormatError::Unit::kLine, line_no);
    const std::string key(text::trim(fields[0]));
    const auto value = text::trim(fields[1]);
    if (key == "kind") {
      const auto k = parse_scenario_kind(value);
      if (!k) throw FormatError("unknown kind '" + std::string(value) + "'", FormatError::Unit::kLine, line_no);
      s.kind = *k;
    } else if (key == "dim") {
      s.dim = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "n_pos") {
      s.n_pos = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "n_neg") {
      s.n_neg = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "cluster_count") {
      s.cluster_count = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "cluster_spread") {
      s.cluster_spread = parse_number<double>(value, key, line_no);
    } else if (key == "signal_dims") {
      s.signal_dims = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "signal_strength") {
      s.signal_strength = parse_number<double>(value, key, line_no);
    } else if (key == "seed") {
      s.seed = parse_number<std::uint64_t>(value, key, line_no);
    } else if (key == "n_filler") {
      s.n_filler = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "center_scale") {
      s.center_scale = parse_number<double>(value, key, line_no);
    } else {
      throw FormatError("unknown scenario key '" + key + "'", FormatError::Unit::kLine, line_no);
    }
  });
  validate(s);
  return s;
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario spec '" + path.string() + "'");
  return read_scenario_spec(in);
}

void write_scenario_spec(const ScenarioSpec& s, std::ostream& out) {
  out << "kind\t" << scenario_kind_name(s.kind) << '\n'
      << "dim\t" << s.dim << '\n'
      << "n_pos\t" << s.n_pos << '\n'
      << "n_neg\t" << s.n_neg << '\n'
      << "cluster_count\t" << s.cluster_count << '\n'
      << "cluster_spread\t" << shortest(s.cluster_spread) << '\n'
      << "signal_dims\t" << s.signal_dims << '\n'
      << "signal_strength\t" << shortest(s.signal_strength) << '\n'
      << "seed\t" << s.seed << '\n'
      << "n_filler\t" << s.n_filler << '\n'
      << "center_scale\t" << shortest(s.center_scale) << '\n';
}

ExportedScenario export_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  const std::string stem = scenario.spec.property_name();
  ExportedScenario out{dir / (stem + ".txt"), dir / (stem + ".tsv"), dir / (stem + ".spec")};
  save_embeddings(scenario.matrix, out.embeddings, EmbeddingFormat::kWord2vecText);
  save_dataset(scenario.dataset, out.dataset);
  std::ofstream spec_out(out.spec, std::ios::binary);
  if (!spec_out) throw IoError("cannot write '" + out.spec.string() + "'");
  write_scenario_spec(scenario.spec, spec_out);
  if (!spec_out.flush()) throw IoError("failed writing '" + out.spec.string() + "'");
  return out;
}

}  // namespace semprobe
