// word2vec binary and text readers/writers.
//
// Binary layout: ASCII header "<vocab_size> <dim>\n", then per entry the token
// bytes terminated by one 0x20, followed by dim little-endian IEEE-754
// float32 values. The reference tool writes a '\n' after every vector; it is
// tolerated (and emitted) but not required.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "semprobe/embedding.hpp"
#include "semprobe/errors.hpp"

namespace semprobe {
namespace {

struct Header {
  std::size_t vocab = 0;
  std::size_t dim = 0;
};

bool parse_size(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

Header parse_header(const std::string& line) {
  std::string_view view = line;
  if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
  const auto space = view.find(' ');
  Header h;
  if (space == std::string_view::npos || !parse_size(view.substr(0, space), h.vocab) ||
      !parse_size(view.substr(space + 1), h.dim)) {
    throw FormatError("malformed header '" + line + "', expected '<vocab_size> <dim>'",
                      FormatError::Unit::kLine, 1);
  }
  if (h.dim == 0) throw FormatError("header declares dimension 0", FormatError::Unit::kLine, 1);
  return h;
}

std::size_t keep_count(const Header& h, const LoadOptions& options) {
  return options.max_vocab == 0 ? h.vocab : std::min(h.vocab, options.max_vocab);
}

float float_from_le(const unsigned char* bytes) {
  std::uint32_t bits = 0;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&bits, bytes, sizeof bits);
  } else {
    bits = static_cast<std::uint32_t>(bytes[0]) | static_cast<std::uint32_t>(bytes[1]) << 8 |
           static_cast<std::uint32_t>(bytes[2]) << 16 | static_cast<std::uint32_t>(bytes[3]) << 24;
  }
  return std::bit_cast<float>(bits);
}

void float_to_le(float value, unsigned char* bytes) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
}

}  // namespace

EmbeddingMatrix read_word2vec_binary(std::istream& in, const LoadOptions& options) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw FormatError("missing header line");
  const Header h = parse_header(header_line);
  const std::size_t keep = keep_count(h, options);

  std::size_t offset = header_line.size() + 1;
  std::vector<std::string> vocab;
  std::vector<float> data;
  vocab.reserve(keep);
  data.reserve(keep * h.dim);
  std::vector<unsigned char> payload(h.dim * 4);

  for (std::size_t entry = 0; entry < keep; ++entry) {
    std::string token;
    const std::size_t token_start = offset;
    for (;;) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) {
        throw FormatError("truncated token in entry " + std::to_string(entry),
                          FormatError::Unit::kByte, offset);
      }
      ++offset;
      if (c == ' ') break;
      if (c == '\n' && token.empty()) continue;  // trailing newline of the previous entry
      token.push_back(static_cast<char>(c));
    }
    if (token.empty()) {
      throw FormatError("empty token in entry " + std::to_string(entry), FormatError::Unit::kByte,
                        token_start);
    }
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != payload.size()) {
      throw FormatError("truncated vector payload for '" + token + "'", FormatError::Unit::kByte,
                        offset + got);
    }
    offset += got;
    for (std::size_t d = 0; d < h.dim; ++d) data.push_back(float_from_le(payload.data() + 4 * d));
    vocab.push_back(std::move(token));
  }
  return EmbeddingMatrix(std::move(vocab), h.dim, std::move(data));
}

EmbeddingMatrix read_word2vec_text(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line");
  const Header h = parse_header(line);
  const std::size_t keep = keep_count(h, options);

  std::vector<std::string> vocab;
  std::vector<float> data;
  vocab.reserve(keep);
  data.reserve(keep * h.dim);
  std::size_t line_no = 1;
  while (vocab.size() < keep) {
    if (!std::getline(in, line)) {
      throw FormatError("expected " + std::to_string(h.vocab) + " entries, found " +
                            std::to_string(vocab.size()),
                        FormatError::Unit::kLine, line_no + 1);
    }
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    const auto space = view.find(' ');
    if (space == 0 || space == std::string_view::npos) {
      throw FormatError("expected '<token> <values...>'", FormatError::Unit::kLine, line_no);
    }
    std::string token(view.substr(0, space));
    const char* p = view.data() + space;
    const char* end = view.data() + view.size();
    for (std::size_t d = 0; d < h.dim; ++d) {
      while (p < end && *p == ' ') ++p;
      float value = 0.0F;
      const auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw FormatError("bad or missing value " + std::to_string(d + 1) + " for '" + token + "'",
                          FormatError::Unit::kLine, line_no);
      }
      data.push_back(value);
      p = next;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) {
      throw FormatError("more than " + std::to_string(h.dim) + " values for '" + token + "'",
                        FormatError::Unit::kLine, line_no);
    }
    vocab.push_back(std::move(token));
  }
  return EmbeddingMatrix(std::move(vocab), h.dim, std::move(data));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings file '" + path.string() + "'");
  return format == EmbeddingFormat::kWord2vecBinary ? read_word2vec_binary(in, options)
                                                    : read_word2vec_text(in, options);
}

void write_word2vec_binary(const EmbeddingMatrix& matrix, std::ostream& out) {
  out << matrix.size() << ' ' << matrix.dim() << '\n';
  std::vector<unsigned char> payload(matrix.dim() * 4);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << matrix.token(i) << ' ';
    const auto row = matrix.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) float_to_le(row[d], payload.data() + 4 * d);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    out << '\n';
  }
}

void write_word2vec_text(const EmbeddingMatrix& matrix, std::ostream& out) {
  out << matrix.size() << ' ' << matrix.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << matrix.token(i);
    for (float v : matrix.row(i)) {
      // Shortest representation that parses back to the same float.
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                     EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings file '" + path.string() + "'");
  if (format == EmbeddingFormat::kWord2vecBinary) {
    write_word2vec_binary(matrix, out);
  } else {
    write_word2vec_text(matrix, out);
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace semprobe
