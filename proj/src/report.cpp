#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "semprobe/errors.hpp"
#include "semprobe/evaluation.hpp"
#include "text_util.hpp"

namespace semprobe {

std::string_view expectation_name(Expectation e) {
  switch (e) {
    case Expectation::kYes:
      return "yes";
    case Expectation::kPossibly:
      return "possibly";
    case Expectation::kNo:
      return "no";
  }
  return "no";
}

std::optional<Expectation> parse_expectation(std::string_view name) {
  if (name == "yes") return Expectation::kYes;
  if (name == "possibly") return Expectation::kPossibly;
  if (name == "no") return Expectation::kNo;
  return std::nullopt;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kConfirmed:
      return "confirmed";
    case Verdict::kBorderline:
      return "borderline";
    case Verdict::kContradicted:
      return "contradicted";
  }
  return "borderline";
}

std::vector<HypothesisResult> compare_hypotheses(std::span<const PropertyReport> reports,
                                                 std::span<const HypothesisEntry> hypotheses,
                                                 const Thresholds& thresholds) {
  if (!(thresholds.possibly <= thresholds.learnable)) {
    throw ConfigError("threshold for 'possibly' exceeds the threshold for 'yes'");
  }
  std::vector<HypothesisResult> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const PropertyReport& r) { return r.property == h.property; });
    if (it == reports.end()) throw MissingReportError(h.property);
    std::optional<double> best = it->f1_lr;
    for (double f : it->f1_net) best = best ? std::max(*best, f) : f;
    if (!best) throw ConfigError("no classifier result for '" + h.property + "' (run lr or net)");

    HypothesisResult r{h.property, h.expected, Expectation::kNo, *best, Verdict::kConfirmed};
    if (*best >= thresholds.learnable) {
      r.observed = Expectation::kYes;
    } else if (*best >= thresholds.possibly) {
      r.observed = Expectation::kPossibly;
    }
    const int distance = std::abs(static_cast<int>(r.observed) - static_cast<int>(r.expected));
    r.verdict = distance == 0 ? Verdict::kConfirmed : distance == 1 ? Verdict::kBorderline : Verdict::kContradicted;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<HypothesisEntry> read_hypotheses(std::istream& in) {
  std::vector<HypothesisEntry> out;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw FormatError("expected 'property<TAB>expected'", FormatError::Unit::kLine, line_no);
    const auto property = text::trim(fields[0]);
    const auto expected = parse_expectation(text::trim(fields[1]));
    if (property.empty() || !expected) {
      throw FormatError("expected value must be yes|possibly|no", FormatError::Unit::kLine, line_no);
    }
    out.push_back({std::string(property), *expected});
  });
  return out;
}

std::vector<HypothesisEntry> load_hypotheses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hypotheses file '" + path.string() + "'");
  return read_hypotheses(in);
}

namespace {

std::string fixed2(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string or_dash(const std::optional<double>& v) { return v ? fixed2(*v) : "-"; }

}  // namespace

void write_verdicts(std::span<const HypothesisResult> results, std::ostream& out) {
  out << "property\texpected\tobserved\tbest-f1\tverdict\n";
  for (const auto& r : results) {
    out << r.property << '\t' << expectation_name(r.expected) << '\t' << expectation_name(r.observed) << '\t'
        << fixed2(r.best_f1) << '\t' << verdict_name(r.verdict) << '\n';
  }
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  return std::nullopt;
}

namespace {

std::size_t net_columns(std::span<const PropertyReport> reports) {
  std::size_t n = 0;
  for (const auto& r : reports) n = std::max(n, r.f1_net.size());
  return n;
}

std::vector<std::string> f1_columns(std::size_t nets) {
  std::vector<std::string> cols{"f1-neigh", "f1-lr"};
  for (std::size_t i = 1; i <= nets; ++i) cols.push_back("f1-net" + std::to_string(i));
  return cols;
}

std::optional<double> f1_value(const PropertyReport& r, std::size_t column) {
  if (column == 0) return r.f1_neigh;
  if (column == 1) return r.f1_lr;
  if (column - 2 < r.f1_net.size()) return r.f1_net[column - 2];
  return std::nullopt;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::map<std::string, double> spearman_summary(std::span<const PropertyReport> reports) {
  std::map<std::string, double> out;
  if (reports.size() < 2) return out;
  const auto cols = f1_columns(net_columns(reports));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : reports) {
      const auto v = f1_value(r, c);
      if (!v || std::isnan(r.avg_cos)) continue;
      xs.push_back(r.avg_cos);
      ys.push_back(*v);
    }
    if (xs.size() >= 2) out[cols[c]] = spearman(xs, ys);
  }
  return out;
}

void emit_report(const ReportTable& table, ReportFormat format, std::ostream& out) {
  if (table.rows.empty()) throw ConfigError("report has no rows");
  const auto cols = f1_columns(net_columns(table.rows));
  std::vector<std::string> header{"property", "pos", "neg", "av-cos", "f1-neigh", "best-n", "f1-lr"};
  header.insert(header.end(), cols.begin() + 2, cols.end());

  std::vector<std::vector<std::string>> body;
  for (const auto& r : table.rows) {
    std::vector<std::string> row{r.property,
                                 std::to_string(r.pos_count),
                                 std::to_string(r.neg_count),
                                 fixed2(r.avg_cos),
                                 or_dash(r.f1_neigh),
                                 r.best_n ? std::to_string(*r.best_n) : "-",
                                 or_dash(r.f1_lr)};
    for (std::size_t c = 2; c < cols.size(); ++c) row.push_back(or_dash(f1_value(r, c)));
    body.push_back(std::move(row));
  }
  if (!table.spearman.empty()) {
    std::vector<std::string> row{"spearman-r", "-", "-", "-"};
    auto cell = [&](const std::string& col) {
      const auto it = table.spearman.find(col);
      return it == table.spearman.end() ? std::string("-") : fixed2(it->second);
    };
    row.push_back(cell("f1-neigh"));
    row.push_back("-");
    row.push_back(cell("f1-lr"));
    for (std::size_t c = 2; c < cols.size(); ++c) row.push_back(cell(cols[c]));
    body.push_back(std::move(row));
  }

  if (format == ReportFormat::kTsv) {
    for (const auto& [key, value] : table.meta) out << "# " << key << '\t' << value << '\n';
    out << join(header, "\t") << '\n';
    for (const auto& row : body) out << join(row, "\t") << '\n';
    for (const auto& r : table.rows) {
      if (!r.oov.empty()) out << "# oov\t" << r.property << '\t' << join(r.oov, ",") << '\n';
    }
    return;
  }

  out << "| " << join(header, " | ") << " |\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& row : body) out << "| " << join(row, " | ") << " |\n";
  if (!table.meta.empty()) out << '\n';
  for (const auto& [key, value] : table.meta) out << "- " << key << ": " << value << '\n';
  for (const auto& r : table.rows) {
    if (!r.oov.empty()) out << "- oov " << r.property << ": " << join(r.oov, ", ") << '\n';
  }
}

void save_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report '" + path.string() + "'");
  emit_report(table, format, out);
  if (!out.flush()) throw IoError("failed writing report '" + path.string() + "'");
}

namespace {

double parse_real(std::string_view s, std::size_t line_no) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("bad number '" + std::string(s) + "'", FormatError::Unit::kLine, line_no);
  }
  return v;
}

std::size_t parse_count(std::string_view s, std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("bad count '" + std::string(s) + "'", FormatError::Unit::kLine, line_no);
  }
  return v;
}

std::optional<double> parse_optional(std::string_view s, std::size_t line_no) {
  if (s == "-") return std::nullopt;
  return parse_real(s, line_no);
}

}  // namespace

ReportTable parse_report(std::istream& in) {
  ReportTable table;
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::string>> oov;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty()) continue;
    if (line.front() == '#') {
      const auto fields = text::split(line.substr(std::min<std::size_t>(2, line.size())), '\t');
      if (fields.size() == 3 && fields[0] == "oov") {
        oov[fields[1]] = text::split(fields[2], ',');
      } else if (fields.size() == 2) {
        table.meta[fields[0]] = fields[1];
      }
      continue;
    }
    const auto fields = text::split(line, '\t');
    if (header.empty()) {
      header = fields;
      if (header.size() < 7 || header[0] != "property") {
        throw FormatError("report header must start with 'property'", FormatError::Unit::kLine, line_no);
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw FormatError("row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()),
                        FormatError::Unit::kLine, line_no);
    }
    if (fields[0] == "spearman-r") {
      for (std::size_t c = 4; c < fields.size(); ++c) {
        if (header[c] == "best-n" || fields[c] == "-") continue;
        table.spearman[header[c]] = parse_real(fields[c], line_no);
      }
      continue;
    }
    PropertyReport r;
    r.property = fields[0];
    r.pos_count = parse_count(fields[1], line_no);
    r.neg_count = parse_count(fields[2], line_no);
    r.avg_cos = parse_real(fields[3], line_no);
    r.f1_neigh = parse_optional(fields[4], line_no);
    if (fields[5] != "-") r.best_n = parse_count(fields[5], line_no);
    r.f1_lr = parse_optional(fields[6], line_no);
    for (std::size_t c = 7; c < fields.size(); ++c) {
      const auto v = parse_optional(fields[c], line_no);
      if (!v) break;
      r.f1_net.push_back(*v);
    }
    table.rows.push_back(std::move(r));
  }
  if (header.empty()) throw FormatError("report has no header");
  for (auto& r : table.rows) {
    if (const auto it = oov.find(r.property); it != oov.end()) r.oov = it->second;
  }
  return table;
}

}  // namespace semprobe
