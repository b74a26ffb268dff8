#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semprobe {

// Base for every error raised by the library. The CLI maps these to exit
// codes; callers that only care about "something went wrong" catch Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `offset` is a byte offset for binary payloads or a
// 1-based line number for text formats (see `unit`).
class FormatError : public Error {
 public:
  enum class Unit { kNone, kByte, kLine };

  explicit FormatError(const std::string& what) : Error(what) {}
  FormatError(const std::string& what, Unit unit, std::size_t offset)
      : Error(what + (unit == Unit::kByte ? " (at byte offset " : " (at line ") +
              std::to_string(offset) + ")"),
        unit_(unit),
        offset_(offset) {}

  Unit unit() const { return unit_; }
  std::size_t offset() const { return offset_; }

 private:
  Unit unit_ = Unit::kNone;
  std::size_t offset_ = 0;
};

class DuplicateTokenError : public Error {
 public:
  explicit DuplicateTokenError(std::string token)
      : Error("duplicate token '" + token + "'"), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class MissingWordError : public Error {
 public:
  explicit MissingWordError(std::string word)
      : Error("word '" + word + "' is not in the embedding vocabulary"), word_(std::move(word)) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnknownPropertyError : public Error {
 public:
  explicit UnknownPropertyError(const std::string& property)
      : Error("unknown property '" + property + "'") {}
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class InconsistentJudgmentError : public Error {
 public:
  using Error::Error;
};

class DegenerateFoldError : public Error {
 public:
  using Error::Error;
};

class SingleClassError : public Error {
 public:
  SingleClassError() : Error("training data contains a single class") {}
};

class MissingReportError : public Error {
 public:
  explicit MissingReportError(const std::string& property)
      : Error("no report for hypothesis property '" + property + "'") {}
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace semprobe
