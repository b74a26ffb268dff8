#include <fstream>
#include <istream>
#include <ostream>

#include "semprobe/dataset.hpp"
#include "semprobe/errors.hpp"
#include "text_util.hpp"

namespace semprobe {
namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " file '" + path.string() + "'");
  return in;
}

CrowdAnswer parse_answer(std::string_view s, std::size_t line_no) {
  if (s == "yes") return CrowdAnswer::kYes;
  if (s == "mostly") return CrowdAnswer::kMostly;
  if (s == "possibly") return CrowdAnswer::kPossibly;
  if (s == "no") return CrowdAnswer::kNo;
  throw FormatError("answer '" + std::string(s) + "' is not one of yes|mostly|possibly|no",
                    FormatError::Unit::kLine, line_no);
}

Provenance parse_provenance(std::string_view s, std::size_t line_no) {
  if (s == "norm") return Provenance::kNorm;
  if (s == "implied") return Provenance::kImplied;
  if (s == "crowd") return Provenance::kCrowd;
  if (s == "seed-expansion") return Provenance::kSeedExpansion;
  throw FormatError("unknown provenance '" + std::string(s) + "'", FormatError::Unit::kLine, line_no);
}

}  // namespace

PropertyNormTable read_norms(std::istream& in) {
  PropertyNormTable table;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2 || text::trim(fields[0]).empty() || text::trim(fields[1]).empty()) {
      throw FormatError("expected 'concept<TAB>property'", FormatError::Unit::kLine, line_no);
    }
    table.add(std::string(text::trim(fields[0])), std::string(text::trim(fields[1])));
  });
  return table;
}

PropertyNormTable ingest_norms(const std::filesystem::path& path) {
  auto in = open_input(path, "norms");
  return read_norms(in);
}

std::vector<ImplicationRule> read_rules(std::istream& in) {
  std::vector<ImplicationRule> rules;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("expected 'source<TAB>implies|excludes<TAB>target'", FormatError::Unit::kLine,
                        line_no);
    }
    const auto kind_text = text::trim(fields[1]);
    ImplicationRule::Kind kind;
    if (kind_text == "implies") {
      kind = ImplicationRule::Kind::kImplies;
    } else if (kind_text == "excludes") {
      kind = ImplicationRule::Kind::kExcludes;
    } else {
      throw FormatError("rule kind '" + std::string(kind_text) + "' is not implies|excludes",
                        FormatError::Unit::kLine, line_no);
    }
    try {
      rules.emplace_back(std::string(text::trim(fields[0])), kind, std::string(text::trim(fields[2])));
    } catch (const ConfigError& e) {
      throw FormatError(e.what(), FormatError::Unit::kLine, line_no);
    }
  });
  return rules;
}

std::vector<ImplicationRule> load_rules(const std::filesystem::path& path) {
  auto in = open_input(path, "rules");
  return read_rules(in);
}

std::vector<CrowdJudgment> read_crowd(std::istream& in) {
  std::vector<CrowdJudgment> out;
  bool first = true;
  text::for_each_record(in, [&](std::string_view line, std::size_t line_no) {
    const auto fields = text::split(line, ',');
    if (first && fields.size() == 3 && text::trim(fields[0]) == "word" &&
        text::trim(fields[2]) == "answer") {
      first = false;
      return;  // header row
    }
    first = false;
    if (fields.size() != 3 || text::trim(fields[0]).empty() || text::trim(fields[1]).empty()) {
      throw FormatError("expected 'word,property,answer'", FormatError::Unit::kLine, line_no);
    }
    out.push_back({std::string(text::trim(fields[0])), std::string(text::trim(fields[1])),
                   parse_answer(text::trim(fields[2]), line_no)});
  });
  return out;
}

std::vector<CrowdJudgment> load_crowd(const std::filesystem::path& path) {
  auto in = open_input(path, "crowd");
  return read_crowd(in);
}

void write_dataset(const PropertyDataset& dataset, std::ostream& out) {
  out << "# property: " << dataset.property() << '\n';
  for (const auto& [word, item] : dataset.items()) {
    out << word << '\t' << (item.positive ? '1' : '0') << '\t' << provenance_name(item.provenance)
        << '\n';
  }
}

void save_dataset(const PropertyDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file '" + path.string() + "'");
  write_dataset(dataset, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

PropertyDataset read_dataset(std::istream& in) {
  PropertyDataset ds;
  bool have_property = false;
  std::string raw;
  std::size_t line_no = 0;
  constexpr std::string_view kHeader = "# property:";
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = text::strip_cr(raw);
    if (text::trim(line).empty()) continue;
    if (line.front() == '#') {
      if (line.substr(0, kHeader.size()) == kHeader) {
        ds.set_property(std::string(text::trim(line.substr(kHeader.size()))));
        have_property = true;
      }
      continue;
    }
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || (fields[1] != "1" && fields[1] != "0")) {
      throw FormatError("expected 'word<TAB>1|0<TAB>provenance'", FormatError::Unit::kLine, line_no);
    }
    if (ds.contains(fields[0])) {
      throw FormatError("word '" + fields[0] + "' labelled twice", FormatError::Unit::kLine, line_no);
    }
    ds.set(fields[0], fields[1] == "1", parse_provenance(fields[2], line_no));
  }
  if (!have_property) throw FormatError("dataset file lacks a '# property: <label>' header");
  return ds;
}

PropertyDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path, "dataset");
  return read_dataset(in);
}

}  // namespace semprobe
