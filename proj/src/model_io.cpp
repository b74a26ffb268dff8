#include <charconv>
#include <istream>
#include <map>
#include <ostream>

#include "semprobe/errors.hpp"
#include "semprobe/probes.hpp"
#include "text_util.hpp"

// One "key value..." line per field after a "semprobe-model 1" header.
// Reals use the shortest round-trip decimal form.

namespace semprobe {
namespace {

constexpr std::string_view kMagic = "semprobe-model";
constexpr int kVersion = 1;

std::string real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void put(std::ostream& out, std::string_view key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << real(v);
  out << '\n';
}

void put_status(std::ostream& out, const TrainingStatus& s) {
  out << "iterations " << s.iterations << '\n';
  out << "stop " << optim::stop_reason_name(s.stop) << '\n';
  out << "converged " << (s.converged ? 1 : 0) << '\n';
}

struct Fields {
  std::map<std::string, std::vector<std::string>> values;

  const std::vector<std::string>& get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw FormatError("model file lacks '" + key + "'");
    return it->second;
  }
  const std::string& one(const std::string& key) const {
    const auto& v = get(key);
    if (v.size() != 1) throw FormatError("model field '" + key + "' expects one value");
    return v.front();
  }
  double real(const std::string& key) const { return parse_real(one(key), key); }
  std::size_t count(const std::string& key) const { return parse_count(one(key), key); }
  std::vector<double> reals(const std::string& key, std::size_t expected) const {
    const auto& v = get(key);
    if (v.size() != expected) {
      throw FormatError("model field '" + key + "' has " + std::to_string(v.size()) + " values, expected " +
                        std::to_string(expected));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(parse_real(s, key));
    return out;
  }

  static double parse_real(const std::string& s, const std::string& key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw FormatError("model field '" + key + "' has bad number '" + s + "'");
    }
    return v;
  }
  static std::size_t parse_count(const std::string& s, const std::string& key) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw FormatError("model field '" + key + "' has bad integer '" + s + "'");
    }
    return v;
  }
};

TrainingStatus read_status(const Fields& f) {
  TrainingStatus s;
  s.iterations = f.count("iterations");
  const auto& stop = f.one("stop");
  bool found = false;
  for (auto r : {optim::StopReason::kGradientTolerance, optim::StopReason::kFunctionTolerance,
                 optim::StopReason::kMaxIterations, optim::StopReason::kLineSearchFailed}) {
    if (optim::stop_reason_name(r) == stop) {
      s.stop = r;
      found = true;
    }
  }
  if (!found) throw FormatError("unknown stop reason '" + stop + "'");
  s.converged = f.count("converged") != 0;
  return s;
}

}  // namespace

void write_model(const ProbeModel& model, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  if (const auto* m = std::get_if<LogisticModel>(&model)) {
    out << "type logistic\n";
    out << "dim " << m->dim() << '\n';
    out << "l2_penalty " << real(m->config.l2_penalty) << '\n';
    out << "tolerance " << real(m->config.tolerance) << '\n';
    out << "max_iterations " << m->config.max_iterations << '\n';
    put_status(out, m->status);
    put(out, "weights", m->weights);
    out << "bias " << real(m->bias) << '\n';
  } else if (const auto* m = std::get_if<MlpModel>(&model)) {
    out << "type mlp\n";
    out << "dim " << m->dim << '\n';
    out << "hidden " << m->hidden << '\n';
    out << "seed " << m->seed << '\n';
    out << "l2_penalty " << real(m->config.l2_penalty) << '\n';
    out << "tolerance " << real(m->config.tolerance) << '\n';
    out << "max_iterations " << m->config.max_iterations << '\n';
    out << "optimizer " << optim::method_name(m->config.optimizer) << '\n';
    put_status(out, m->status);
    put(out, "hidden_weights", m->hidden_weights);
    put(out, "hidden_bias", m->hidden_bias);
    put(out, "output_weights", m->output_weights);
    out << "output_bias " << real(m->output_bias) << '\n';
  } else {
    const auto& c = std::get<CentroidModel>(model);
    out << "type centroid\n";
    out << "dim " << c.centroid.dim() << '\n';
    out << "n " << c.n << '\n';
    if (c.pool.is_full()) {
      out << "pool full\n";
    } else {
      out << "pool rows";
      for (std::size_t r : c.pool.rows()) out << ' ' << r;
      out << '\n';
    }
    put(out, "centroid", c.centroid.values());
  }
}

ProbeModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file");
  const auto head = text::split(text::strip_cr(line), ' ');
  if (head.size() != 2 || head[0] != kMagic) throw FormatError("not a semprobe model file", FormatError::Unit::kLine, 1);
  if (head[1] != std::to_string(kVersion)) {
    throw FormatError("unsupported model version '" + head[1] + "'", FormatError::Unit::kLine, 1);
  }
  Fields f;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(text::strip_cr(line));
    if (trimmed.empty()) continue;
    auto parts = text::split(trimmed, ' ');
    std::string key = std::move(parts.front());
    parts.erase(parts.begin());
    if (!f.values.emplace(key, std::move(parts)).second) {
      throw FormatError("repeated model field '" + key + "'", FormatError::Unit::kLine, line_no);
    }
  }

  const auto& type = f.one("type");
  const std::size_t dim = f.count("dim");
  if (dim == 0) throw FormatError("model dim must be positive");
  if (type == "logistic") {
    LogisticModel m;
    m.config.l2_penalty = f.real("l2_penalty");
    m.config.tolerance = f.real("tolerance");
    m.config.max_iterations = f.count("max_iterations");
    m.status = read_status(f);
    m.weights = f.reals("weights", dim);
    m.bias = f.real("bias");
    return m;
  }
  if (type == "mlp") {
    const std::size_t hidden = f.count("hidden");
    if (hidden == 0) throw FormatError("hidden layer size must be positive");
    MlpModel m;
    m.dim = dim;
    m.hidden = hidden;
    m.seed = f.count("seed");
    m.config.l2_penalty = f.real("l2_penalty");
    m.config.tolerance = f.real("tolerance");
    m.config.max_iterations = f.count("max_iterations");
    const auto& opt = f.one("optimizer");
    if (opt == optim::method_name(optim::Method::kLbfgs)) {
      m.config.optimizer = optim::Method::kLbfgs;
    } else if (opt == optim::method_name(optim::Method::kGradientDescent)) {
      m.config.optimizer = optim::Method::kGradientDescent;
    } else {
      throw FormatError("unknown optimizer '" + opt + "'");
    }
    m.status = read_status(f);
    m.hidden_weights = f.reals("hidden_weights", hidden * dim);
    m.hidden_bias = f.reals("hidden_bias", hidden);
    m.output_weights = f.reals("output_weights", hidden);
    m.output_bias = f.real("output_bias");
    return m;
  }
  if (type == "centroid") {
    const auto& pool = f.get("pool");
    CentroidModel m;
    if (pool.size() == 1 && pool[0] == "full") {
      m.pool = CandidatePool::full_vocabulary();
    } else if (!pool.empty() && pool[0] == "rows") {
      std::vector<std::size_t> rows;
      for (std::size_t i = 1; i < pool.size(); ++i) rows.push_back(Fields::parse_count(pool[i], "pool"));
      m.pool = CandidatePool::from_rows(std::move(rows));
    } else {
      throw FormatError("pool must be 'full' or 'rows ...'");
    }
    m.n = f.count("n");
    m.centroid = WordVector(f.reals("centroid", dim));
    return m;
  }
  throw FormatError("unknown model type '" + type + "'");
}

}  // namespace semprobe
